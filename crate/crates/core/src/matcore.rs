//! Dense symmetric and PSD matrix primitives.
//!
//! Square roots go through a symmetric eigendecomposition. Eigenvalues in
//! `[-1e-8 ‖A‖_F, 0)` are treated as round-off and clipped to zero, as are
//! positive eigenvalues at machine-precision level; anything more negative is
//! rejected as indefinite.

use nalgebra::{DMatrix, DVector};

use crate::error::{AbwError, Result};

/// Absolute floor applied to every relative tolerance.
pub const ABS_FLOOR: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;
const INDEFINITE_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-8;
const RADICAND_TOL: f64 = 1e-10;

/// Frobenius norm.
pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest entrywise asymmetry `max |A_ij − A_ji|`.
fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn check_square(a: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(AbwError::DimensionMismatch {
            what,
            left: a.nrows(),
            right: a.ncols(),
        });
    }
    Ok(())
}

/// Fails with [`AbwError::NonSymmetric`] unless
/// `|A_ij − A_ji| ≤ 1e-12 · max(1, ‖A‖_F)` everywhere.
pub fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    check_square(a, "square matrix")?;
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOL * frobenius(a).max(1.0) {
        return Err(AbwError::NonSymmetric { asymmetry: asym });
    }
    Ok(())
}

/// Eigenpairs of a symmetric matrix, eigenvalues sorted in descending order.
/// Column `k` of the returned matrix is the eigenvector for eigenvalue `k`.
pub fn sym_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = symmetrize(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Magnitude below which an eigenvalue of an `n × n` matrix with Frobenius
/// norm `scale` cannot be told apart from zero.
fn roundoff_level(n: usize, scale: f64) -> f64 {
    n as f64 * f64::EPSILON * scale
}

/// Clips eigenvalues at the round-off level to exactly zero. Their square
/// roots would otherwise inject `O(sqrt(eps))` noise.
fn clip_eigenvalues(values: &mut DVector<f64>, scale: f64) {
    let level = roundoff_level(values.len(), scale);
    values
        .iter_mut()
        .for_each(|v| *v = if *v <= level { 0.0 } else { *v });
}

/// Eigendecomposition of a matrix that must be symmetric and numerically PSD.
/// Negative and round-off eigenvalues are clipped to zero.
fn psd_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_symmetric(a)?;
    let (mut values, vectors) = sym_eigen(a);
    let scale = frobenius(a).max(ABS_FLOOR);
    if let Some(&min) = values.iter().next_back() {
        if min < -INDEFINITE_TOL * scale {
            return Err(AbwError::IndefiniteInput {
                min_eigenvalue: min,
            });
        }
    }
    clip_eigenvalues(&mut values, frobenius(a));
    Ok((values, vectors))
}

fn reassemble(values: &DVector<f64>, vectors: &DMatrix<f64>) -> DMatrix<f64> {
    let scaled = vectors * DMatrix::from_diagonal(values);
    symmetrize(&(scaled * vectors.transpose()))
}

/// Unique PSD square root.
pub fn psd_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = psd_eigen(a)?;
    Ok(reassemble(&values.map(f64::sqrt), &vectors))
}

/// Inverse PSD square root. Eigenvalues at or below `floor` are treated as
/// singular directions and mapped to zero (pseudo-inverse semantics).
pub fn psd_inv_sqrt(a: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    let (values, vectors) = psd_eigen(a)?;
    let inv = values.map(|v| if v > floor { 1.0 / v.sqrt() } else { 0.0 });
    Ok(reassemble(&inv, &vectors))
}

/// Smallest eigenvalue of a symmetric matrix (`+∞` for the empty matrix).
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    sym_eigen(a).0.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `tr((B^{1/2} A B^{1/2})^{1/2})`; validates both operands as PSD.
fn fidelity(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    psd_eigen(a)?;
    let root_b = psd_sqrt(b)?;
    let inner = symmetrize(&(&root_b * a * &root_b));
    let mut spectrum = sym_eigen(&inner).0;
    clip_eigenvalues(&mut spectrum, frobenius(&inner));
    Ok(spectrum.iter().map(|v| v.sqrt()).sum())
}

/// Classical Bures–Wasserstein distance between two PSD matrices:
/// `sqrt(tr A + tr B − 2 tr((B^{1/2} A B^{1/2})^{1/2}))`.
pub fn bw_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    check_square(a, "bw_distance operand")?;
    check_square(b, "bw_distance operand")?;
    if a.nrows() != b.nrows() {
        return Err(AbwError::DimensionMismatch {
            what: "bw_distance operands",
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    // averaging both orders makes the result exactly symmetric
    let fidelity = 0.5 * (fidelity(a, b)? + fidelity(b, a)?);
    let total = a.trace() + b.trace();
    let radicand = total - 2.0 * fidelity;
    debug_assert!(radicand > -RADICAND_TOL * total.abs().max(1.0));
    Ok(radicand.max(0.0).sqrt())
}

/// Result of [`procrustes_align`].
#[derive(Debug, Clone, PartialEq)]
pub struct Procrustes {
    /// Orthogonal maximizer of `tr(M Oᵀ)`.
    pub rotation: DMatrix<f64>,
    /// Nuclear norm of `M`, equal to the attained maximum.
    pub nuclear: f64,
}

/// Orthogonal Procrustes alignment of a square matrix.
///
/// With `M = U S Vᵀ` this returns the polar factor `O = U Vᵀ`, which
/// maximizes `tr(M Oᵀ)` over the orthogonal group with maximum `tr S`.
/// For repeated or vanishing singular values the returned rotation is one
/// maximizer among several.
pub fn procrustes_align(m: &DMatrix<f64>) -> Procrustes {
    debug_assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 1 {
        let x = m[(0, 0)];
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        return Procrustes {
            rotation: DMatrix::from_element(1, 1, sign),
            nuclear: x.abs(),
        };
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    Procrustes {
        rotation: u * v_t,
        nuclear: svd.singular_values.sum(),
    }
}

/// Factor `Σ ≈ F Fᵀ` with exactly `rank_cap` columns, built from the top
/// eigenpairs in descending order. Fails when more than `rank_cap`
/// eigenvalues exceed `1e-8 ‖Σ‖_F`.
pub fn psd_factor(sigma: &DMatrix<f64>, rank_cap: usize) -> Result<DMatrix<f64>> {
    let (values, vectors) = psd_eigen(sigma)?;
    let n = sigma.nrows();
    let threshold = RANK_TOL * frobenius(sigma).max(ABS_FLOOR);
    let significant = values.iter().filter(|&&v| v > threshold).count();
    if significant > rank_cap {
        return Err(AbwError::RankExceeded {
            significant,
            cap: rank_cap,
        });
    }
    let mut factor = DMatrix::zeros(n, rank_cap);
    for k in 0..rank_cap.min(n) {
        let scaled = vectors.column(k) * values[k].sqrt();
        factor.set_column(k, &scaled);
    }
    Ok(factor)
}
