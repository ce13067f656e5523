//! Gaussian processes parametrized by block-lower-triangular factors.
//!
//! Time indices in this module are zero-based: a factor with `steps = T`
//! has block rows and columns `0..T`.

pub mod json;

use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::error::{AbwError, Result};
use crate::matcore::{self, ABS_FLOOR};

const ORTHOGONALITY_TOL: f64 = 1e-10;
const REGULARITY_TOL: f64 = 1e-10;
const PINV_TOL: f64 = 1e-12;

/// Block-lower-triangular `dT × dT` factor with `d × d` blocks. Blocks
/// strictly above the block diagonal are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBlockFactor {
    d: usize,
    steps: usize,
    matrix: DMatrix<f64>,
}

fn check_shape(d: usize, steps: usize) -> Result<()> {
    if d == 0 || steps == 0 {
        return Err(AbwError::InvalidProblem(format!(
            "factor needs d >= 1 and T >= 1, got d = {d}, T = {steps}"
        )));
    }
    Ok(())
}

impl LowerBlockFactor {
    /// Wraps a full matrix, rejecting nonzero entries above the block
    /// diagonal.
    pub fn new(d: usize, steps: usize, matrix: DMatrix<f64>) -> Result<Self> {
        check_shape(d, steps)?;
        let n = d * steps;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(AbwError::DimensionMismatch {
                what: "factor size vs d*T",
                left: matrix.nrows().max(matrix.ncols()),
                right: n,
            });
        }
        for row in 0..n {
            for col in (row / d + 1) * d..n {
                let value = matrix[(row, col)];
                if value != 0.0 {
                    return Err(AbwError::NotBlockLower { row, col, value });
                }
            }
        }
        Ok(Self { d, steps, matrix })
    }

    /// Keeps the block-lower part of `matrix` and zeroes the rest.
    pub fn from_lower_part(d: usize, steps: usize, mut matrix: DMatrix<f64>) -> Result<Self> {
        check_shape(d, steps)?;
        let n = d * steps;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(AbwError::DimensionMismatch {
                what: "factor size vs d*T",
                left: matrix.nrows().max(matrix.ncols()),
                right: n,
            });
        }
        for row in 0..n {
            for col in (row / d + 1) * d..n {
                matrix[(row, col)] = 0.0;
            }
        }
        Ok(Self { d, steps, matrix })
    }

    pub fn identity(d: usize, steps: usize) -> Self {
        let n = d * steps;
        Self {
            d,
            steps,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(d: usize, steps: usize) -> Self {
        let n = d * steps;
        Self {
            d,
            steps,
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `d · T`.
    pub fn dim(&self) -> usize {
        self.d * self.steps
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.norm()
    }

    /// Block `(t, s)`.
    pub fn block(&self, t: usize, s: usize) -> DMatrixView<'_, f64> {
        self.matrix.view((t * self.d, s * self.d), (self.d, self.d))
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(AbwError::DimensionMismatch {
                what: "step dimension d",
                left: self.d,
                right: other.d,
            });
        }
        if self.steps != other.steps {
            return Err(AbwError::DimensionMismatch {
                what: "number of steps T",
                left: self.steps,
                right: other.steps,
            });
        }
        Ok(())
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t >= self.steps {
            return Err(AbwError::IndexOutOfRange {
                index: t,
                steps: self.steps,
            });
        }
        Ok(())
    }

    /// View of the nonzero part of block column `t`, rows `t d .. T d`.
    pub(crate) fn column_view(&self, t: usize) -> DMatrixView<'_, f64> {
        let start = t * self.d;
        self.matrix
            .view((start, start), (self.dim() - start, self.d))
    }

    /// Stack `(L_{t,t}; L_{t+1,t}; …; L_{T−1,t})`.
    pub fn truncated_column(&self, t: usize) -> Result<TruncatedColumn> {
        self.check_time(t)?;
        Ok(TruncatedColumn {
            t,
            entries: self.column_view(t).into_owned(),
        })
    }

    /// Overwrites the nonzero part of block column `t`.
    pub fn set_truncated_column(&mut self, t: usize, entries: &DMatrix<f64>) -> Result<()> {
        self.check_time(t)?;
        let start = t * self.d;
        let rows = self.dim() - start;
        if entries.nrows() != rows || entries.ncols() != self.d {
            return Err(AbwError::DimensionMismatch {
                what: "truncated column rows",
                left: entries.nrows(),
                right: rows,
            });
        }
        self.matrix
            .view_mut((start, start), (rows, self.d))
            .copy_from(entries);
        Ok(())
    }

    /// Column covariance `L̃_t L̃_tᵀ`, of rank at most `d`.
    pub fn column_covariance(&self, t: usize) -> Result<DMatrix<f64>> {
        self.check_time(t)?;
        let col = self.column_view(t);
        Ok(col * col.transpose())
    }

    /// Gram block `(Lᵀ L)_{t,t} = L̃_tᵀ L̃_t`.
    pub fn gram_block(&self, t: usize) -> DMatrix<f64> {
        let col = self.column_view(t);
        col.transpose() * col
    }

    /// `L Lᵀ`.
    pub fn covariance(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }

    /// True iff every Gram block `(Lᵀ L)_{t,t}` has smallest eigenvalue above
    /// `tol`. `None` uses `1e-10 ‖L‖_F²`.
    pub fn is_regular(&self, tol: Option<f64>) -> bool {
        let tol = tol.unwrap_or_else(|| REGULARITY_TOL * self.frobenius().powi(2));
        (0..self.steps).all(|t| matcore::min_eigenvalue(&self.gram_block(t)) > tol)
    }

    /// `L · O`.
    pub fn right_mul(&self, rotation: &BlockOrthogonal) -> Result<Self> {
        if rotation.d() != self.d || rotation.steps() != self.steps {
            return Err(AbwError::DimensionMismatch {
                what: "block-orthogonal shape",
                left: rotation.d() * rotation.steps(),
                right: self.dim(),
            });
        }
        let mut out = self.matrix.clone();
        for (s, block) in rotation.blocks().iter().enumerate() {
            let start = s * self.d;
            let rows = self.dim() - start;
            let rotated = self.column_view(s) * block;
            out.view_mut((start, start), (rows, self.d))
                .copy_from(&rotated);
        }
        Ok(Self {
            d: self.d,
            steps: self.steps,
            matrix: out,
        })
    }

    /// Class representative whose diagonal blocks are symmetric PSD: each
    /// block column is rotated by the polar factor that symmetrizes its
    /// diagonal block. For `d = 1` this makes the diagonal nonnegative.
    pub fn canonicalize(&self) -> Self {
        let blocks = (0..self.steps)
            .map(|t| matcore::procrustes_align(&self.block(t, t).transpose().into_owned()).rotation)
            .collect();
        let rotation = BlockOrthogonal {
            d: self.d,
            blocks,
        };
        self.right_mul(&rotation)
            .expect("rotation built with matching shape")
    }

    /// A factor `L` with `L Lᵀ = Σ`.
    ///
    /// Positive definite inputs get the ordinary Cholesky factor. Singular
    /// inputs are factored block row by block row: the off-diagonal part of
    /// row `t` is the minimum-norm solution against the rows already built,
    /// and the diagonal block factors the Schur-complement residual.
    pub fn from_covariance(sigma: &DMatrix<f64>, d: usize) -> Result<Self> {
        matcore::check_symmetric(sigma)?;
        if d == 0 || !sigma.nrows().is_multiple_of(d) || sigma.nrows() == 0 {
            return Err(AbwError::DimensionNotMultiple {
                n: sigma.nrows(),
                d,
            });
        }
        let steps = sigma.nrows() / d;
        let scale = sigma.norm().max(ABS_FLOOR);
        let min_eig = matcore::min_eigenvalue(sigma);
        if min_eig < -1e-8 * scale {
            return Err(AbwError::NotPsd {
                min_eigenvalue: min_eig,
            });
        }
        let sym = matcore::symmetrize(sigma);
        if min_eig > 1e-10 * scale {
            if let Some(chol) = sym.clone().cholesky() {
                return Ok(Self {
                    d,
                    steps,
                    matrix: chol.l(),
                });
            }
        }

        let n = sigma.nrows();
        let mut matrix = DMatrix::zeros(n, n);
        for t in 0..steps {
            let r0 = t * d;
            let diag = sym.view((r0, r0), (d, d)).into_owned();
            let residual = if t == 0 {
                diag
            } else {
                let built = matrix.view((0, 0), (r0, r0)).into_owned();
                let cross = sym.view((r0, 0), (d, r0)).into_owned();
                // X Bᵀ = C in the least-squares sense, X = C (Bᵀ)^+
                let pinv = built
                    .transpose()
                    .pseudo_inverse(PINV_TOL * scale)
                    .map_err(|_| AbwError::NotPsd {
                        min_eigenvalue: min_eig,
                    })?;
                let row = cross * pinv;
                let residual = &diag - &row * row.transpose();
                matrix.view_mut((r0, 0), (d, r0)).copy_from(&row);
                residual
            };
            let residual = clip_psd(&matcore::symmetrize(&residual));
            let block = matcore::psd_factor(&residual, d)?;
            matrix.view_mut((r0, r0), (d, d)).copy_from(&block);
        }
        Ok(Self { d, steps, matrix })
    }
}

/// Projects a symmetric matrix onto the PSD cone by clipping eigenvalues.
fn clip_psd(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = matcore::sym_eigen(a);
    let clipped = values.map(|v| v.max(0.0));
    matcore::symmetrize(&(&vectors * DMatrix::from_diagonal(&clipped) * vectors.transpose()))
}

/// Nonzero part of one block column of a factor.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedColumn {
    /// Zero-based time index.
    pub t: usize,
    /// `(T − t) d × d` stack of blocks.
    pub entries: DMatrix<f64>,
}

/// Block-diagonal orthogonal matrix `diag(O_0, …, O_{T−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOrthogonal {
    d: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl BlockOrthogonal {
    pub fn new(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        let d = blocks.first().map(|b| b.nrows()).unwrap_or(0);
        if d == 0 {
            return Err(AbwError::InvalidProblem(
                "block-orthogonal matrix needs at least one nonempty block".into(),
            ));
        }
        for (index, block) in blocks.iter().enumerate() {
            if block.nrows() != d || block.ncols() != d {
                return Err(AbwError::DimensionMismatch {
                    what: "orthogonal block size",
                    left: block.nrows().max(block.ncols()),
                    right: d,
                });
            }
            let deviation = (block.transpose() * block - DMatrix::identity(d, d)).norm();
            if deviation > ORTHOGONALITY_TOL {
                return Err(AbwError::NotOrthogonal { index, deviation });
            }
        }
        Ok(Self { d, blocks })
    }

    pub(crate) fn from_blocks_unchecked(d: usize, blocks: Vec<DMatrix<f64>>) -> Self {
        Self { d, blocks }
    }

    pub fn identity(d: usize, steps: usize) -> Self {
        Self {
            d,
            blocks: vec![DMatrix::identity(d, d); steps],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn steps(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// Dense `dT × dT` form.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.d * self.blocks.len();
        let mut m = DMatrix::zeros(n, n);
        for (t, block) in self.blocks.iter().enumerate() {
            m.view_mut((t * self.d, t * self.d), (self.d, self.d))
                .copy_from(block);
        }
        m
    }
}

/// `X = a + L G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProcess {
    mean: DVector<f64>,
    factor: LowerBlockFactor,
}

impl GaussianProcess {
    pub fn new(mean: DVector<f64>, factor: LowerBlockFactor) -> Result<Self> {
        if mean.len() != factor.dim() {
            return Err(AbwError::DimensionMismatch {
                what: "mean length vs d*T",
                left: mean.len(),
                right: factor.dim(),
            });
        }
        Ok(Self { mean, factor })
    }

    pub fn centered(factor: LowerBlockFactor) -> Self {
        Self {
            mean: DVector::zeros(factor.dim()),
            factor,
        }
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn factor(&self) -> &LowerBlockFactor {
        &self.factor
    }

    pub fn into_parts(self) -> (DVector<f64>, LowerBlockFactor) {
        (self.mean, self.factor)
    }
}

/// True iff all column covariances agree:
/// `‖Σ̃_t^L − Σ̃_t^M‖_F ≤ tol · max(1, ‖Σ̃_t^L‖_F)` for every `t`.
pub fn classes_equal(l: &LowerBlockFactor, m: &LowerBlockFactor, tol: f64) -> Result<bool> {
    l.same_shape(m)?;
    Ok(class_gap(l, m)?
        .iter()
        .all(|&(gap, norm)| gap <= tol * norm.max(1.0)))
}

/// Per-column `(‖Σ̃_t^L − Σ̃_t^M‖_F, ‖Σ̃_t^L‖_F)`.
pub fn class_gap(l: &LowerBlockFactor, m: &LowerBlockFactor) -> Result<Vec<(f64, f64)>> {
    l.same_shape(m)?;
    (0..l.steps())
        .map(|t| {
            let a = l.column_covariance(t)?;
            let b = m.column_covariance(t)?;
            Ok(((&a - &b).norm(), a.norm()))
        })
        .collect()
}

/// Largest relative column-covariance gap,
/// `max_t ‖Σ̃_t^L − Σ̃_t^M‖_F / max(1, ‖Σ̃_t^L‖_F)`.
pub fn class_distance(l: &LowerBlockFactor, m: &LowerBlockFactor) -> Result<f64> {
    Ok(class_gap(l, m)?
        .into_iter()
        .map(|(gap, norm)| gap / norm.max(1.0))
        .fold(0.0, f64::max))
}

/// Scalar time-varying AR(1) parameters: `X_0 = σ_0 G_0`,
/// `X_t = α_t X_{t−1} + σ_t G_t`. `alphas[0]` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Ar1Spec {
    alphas: Vec<f64>,
    sigmas: Vec<f64>,
}

impl Ar1Spec {
    pub fn new(alphas: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        if alphas.len() != sigmas.len() {
            return Err(AbwError::DimensionMismatch {
                what: "alphas vs sigmas length",
                left: alphas.len(),
                right: sigmas.len(),
            });
        }
        if sigmas.is_empty() {
            return Err(AbwError::InvalidProblem("AR(1) spec needs T >= 1".into()));
        }
        if let Some((index, &value)) = sigmas.iter().enumerate().find(|(_, s)| !(**s > 0.0)) {
            return Err(AbwError::NonPositiveSigma { index, value });
        }
        Ok(Self { alphas, sigmas })
    }

    /// Constant coefficient and volatility over `steps` steps.
    pub fn constant(alpha: f64, sigma: f64, steps: usize) -> Result<Self> {
        Self::new(vec![alpha; steps], vec![sigma; steps])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn steps(&self) -> usize {
        self.sigmas.len()
    }
}

/// Factor with `L_{t,s} = σ_s ∏_{k=s+1}^{t} α_k` for `s ≤ t`.
pub fn ar1_factor(spec: &Ar1Spec) -> LowerBlockFactor {
    let steps = spec.steps();
    let mut matrix = DMatrix::zeros(steps, steps);
    for s in 0..steps {
        let mut value = spec.sigmas[s];
        matrix[(s, s)] = value;
        for t in (s + 1)..steps {
            value *= spec.alphas[t];
            matrix[(t, s)] = value;
        }
    }
    LowerBlockFactor {
        d: 1,
        steps,
        matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn l1() -> LowerBlockFactor {
        LowerBlockFactor::new(1, 2, dmatrix![1.0, 0.0; 0.5, 1.0]).unwrap()
    }

    fn l2() -> LowerBlockFactor {
        LowerBlockFactor::new(1, 2, dmatrix![1.0, 0.0; -0.5, 1.0]).unwrap()
    }

    #[test]
    fn rejects_upper_entries() {
        let err = LowerBlockFactor::new(1, 2, dmatrix![1.0, 0.1; 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, AbwError::NotBlockLower { row: 0, col: 1, .. }));
        // within a diagonal block anything goes
        assert!(LowerBlockFactor::new(2, 1, dmatrix![1.0, 0.3; 0.2, 1.0]).is_ok());
    }

    #[test]
    fn truncated_columns() {
        let c = l1().truncated_column(0).unwrap();
        assert_eq!(c.entries, dmatrix![1.0; 0.5]);
        let c = l1().truncated_column(1).unwrap();
        assert_eq!(c.entries, dmatrix![1.0]);
        let eye = LowerBlockFactor::identity(1, 4);
        for t in 0..4 {
            let c = eye.truncated_column(t).unwrap().entries;
            assert_eq!(c.nrows(), 4 - t);
            assert_eq!(c[(0, 0)], 1.0);
            assert!(c.rows(1, 3 - t).iter().all(|&x| x == 0.0));
        }
        assert_eq!(
            l1().truncated_column(2).unwrap_err(),
            AbwError::IndexOutOfRange { index: 2, steps: 2 }
        );
    }

    #[test]
    fn column_covariances() {
        let c = l1().column_covariance(0).unwrap();
        assert_eq!(c, dmatrix![1.0, 0.5; 0.5, 0.25]);
        let eye = LowerBlockFactor::identity(2, 3);
        assert_eq!(eye.column_covariance(2).unwrap(), DMatrix::identity(2, 2));
        assert!(eye.column_covariance(3).is_err());
    }

    #[test]
    fn regularity() {
        assert!(l1().is_regular(None));
        assert!(LowerBlockFactor::identity(2, 3).is_regular(None));
        let zero_col = LowerBlockFactor::new(1, 2, dmatrix![1.0, 0.0; 0.5, 0.0]).unwrap();
        assert!(!zero_col.is_regular(None));
    }

    #[test]
    fn covariance_of_example_pair() {
        assert_eq!(l1().covariance(), dmatrix![1.0, 0.5; 0.5, 1.25]);
        assert_eq!(l2().covariance(), dmatrix![1.0, -0.5; -0.5, 1.25]);
        assert_eq!(
            LowerBlockFactor::identity(2, 2).covariance(),
            DMatrix::identity(4, 4)
        );
    }

    #[test]
    fn from_covariance_examples() {
        let eye = LowerBlockFactor::from_covariance(&DMatrix::identity(3, 3), 1).unwrap();
        assert!((eye.matrix() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);

        let f = LowerBlockFactor::from_covariance(&dmatrix![1.0, 0.5; 0.5, 1.25], 1).unwrap();
        assert!((f.matrix() - l1().matrix()).norm() < 1e-14);

        let v = nalgebra::dvector![1.0, 0.5];
        let sigma = &v * v.transpose();
        let f = LowerBlockFactor::from_covariance(&sigma, 1).unwrap();
        assert!((f.covariance() - &sigma).norm() < 1e-12);
        assert!(f.block(1, 1)[(0, 0)].abs() < 1e-8);

        assert_eq!(
            LowerBlockFactor::from_covariance(&DMatrix::identity(3, 3), 2).unwrap_err(),
            AbwError::DimensionNotMultiple { n: 3, d: 2 }
        );
        assert!(matches!(
            LowerBlockFactor::from_covariance(&dmatrix![1.0, 0.0; 0.0, -1.0], 1),
            Err(AbwError::NotPsd { .. })
        ));
    }

    #[test]
    fn from_covariance_singular_blocks() {
        // rank 2 in dimension 4, d = 2: second step fully determined by the first
        let base = dmatrix![1.0, 0.0; 0.3, 0.8; 0.5, -0.2; 0.1, 0.9];
        let sigma = &base * base.transpose();
        let f = LowerBlockFactor::from_covariance(&sigma, 2).unwrap();
        assert!((f.covariance() - &sigma).norm() < 1e-8 * sigma.norm().max(1.0));
    }

    #[test]
    fn equality_of_classes() {
        assert!(!classes_equal(&l1(), &l2(), 1e-8).unwrap());
        let flipped = LowerBlockFactor::new(1, 2, dmatrix![-1.0, 0.0; -0.5, 1.0]).unwrap();
        assert!(classes_equal(&l1(), &flipped, 1e-12).unwrap());
        let other = LowerBlockFactor::identity(1, 3);
        assert!(classes_equal(&l1(), &other, 1e-8).is_err());
    }

    #[test]
    fn canonical_representative() {
        let l = LowerBlockFactor::new(1, 2, dmatrix![-1.0, 0.0; 0.5, -1.0]).unwrap();
        let c = l.canonicalize();
        assert_eq!(c.matrix(), &dmatrix![1.0, 0.0; -0.5, 1.0]);
        assert_eq!(c.canonicalize(), c);
        let eye = LowerBlockFactor::identity(2, 2);
        assert!((eye.canonicalize().matrix() - eye.matrix()).norm() < 1e-14);
    }

    #[test]
    fn canonical_diagonal_blocks_are_psd() {
        let m = dmatrix![
            0.0, -2.0, 0.0, 0.0;
            1.0, 0.5, 0.0, 0.0;
            0.3, 0.1, -1.0, 0.2;
            0.4, 0.7, 0.1, 1.5
        ];
        let l = LowerBlockFactor::new(2, 2, m).unwrap();
        let c = l.canonicalize();
        for t in 0..2 {
            let b = c.block(t, t).into_owned();
            assert!((&b - b.transpose()).norm() < 1e-12);
            assert!(matcore::min_eigenvalue(&b) > -1e-12);
        }
        assert!(classes_equal(&l, &c, 1e-12).unwrap());
    }

    #[test]
    fn ar1_examples() {
        let spec = Ar1Spec::new(vec![0.0, 0.5], vec![1.0, 1.0]).unwrap();
        assert_eq!(ar1_factor(&spec).matrix(), l1().matrix());

        let spec = Ar1Spec::new(vec![0.0; 3], vec![2.0, 3.0, 0.5]).unwrap();
        assert_eq!(
            ar1_factor(&spec).matrix(),
            &DMatrix::from_diagonal(&nalgebra::dvector![2.0, 3.0, 0.5])
        );

        let (a, b) = (0.7, -0.3);
        let spec = Ar1Spec::new(vec![9.0, a, b], vec![1.0; 3]).unwrap();
        let expected = dmatrix![1.0, 0.0, 0.0; a, 1.0, 0.0; a * b, b, 1.0];
        assert_eq!(ar1_factor(&spec).matrix(), &expected);

        assert_eq!(
            Ar1Spec::new(vec![0.0, 0.5], vec![1.0, 0.0]).unwrap_err(),
            AbwError::NonPositiveSigma {
                index: 1,
                value: 0.0
            }
        );
    }

    #[test]
    fn block_orthogonal_validation() {
        assert!(BlockOrthogonal::new(vec![dmatrix![1.0, 0.1; 0.0, 1.0]]).is_err());
        let o = BlockOrthogonal::new(vec![dmatrix![0.0, 1.0; -1.0, 0.0], DMatrix::identity(2, 2)])
            .unwrap();
        assert_eq!(o.to_matrix().nrows(), 4);
        let l = LowerBlockFactor::identity(2, 2);
        let rotated = l.right_mul(&o).unwrap();
        assert_eq!(rotated.matrix(), &o.to_matrix());
    }

    #[test]
    fn process_mean_length() {
        let err = GaussianProcess::new(DVector::zeros(3), l1()).unwrap_err();
        assert!(matches!(err, AbwError::DimensionMismatch { .. }));
    }
}
