//! Adapted distances between Gaussian processes.
//!
//! `d²_ABW(L, M) = min_O ‖L − M O‖²_F = ‖L‖²_F + ‖M‖²_F − 2 Σ_t ‖(Mᵀ L)_{t,t}‖_*`
//! with `‖·‖_*` the nuclear norm. The same value is obtained column by column
//! as `Σ_t d²_BW(Σ̃_t^L, Σ̃_t^M)`; [`abw_via_columns`] computes that route.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::matcore::{self, Procrustes};
use crate::process::{BlockOrthogonal, GaussianProcess, LowerBlockFactor};

/// `(Mᵀ L)_{t,t}`, computed from the truncated columns.
fn cross_gram(l: &LowerBlockFactor, m: &LowerBlockFactor, t: usize) -> DMatrix<f64> {
    m.column_view(t).transpose() * l.column_view(t)
}

fn nuclear_sum(l: &LowerBlockFactor, m: &LowerBlockFactor) -> f64 {
    (0..l.steps())
        .map(|t| matcore::procrustes_align(&cross_gram(l, m, t)).nuclear)
        .sum()
}

/// Squared adapted Bures–Wasserstein distance.
pub fn abw_distance_sq(l: &LowerBlockFactor, m: &LowerBlockFactor) -> Result<f64> {
    l.same_shape(m)?;
    // averaging both argument orders makes the result bitwise symmetric
    let nuclear = 0.5 * (nuclear_sum(l, m) + nuclear_sum(m, l));
    let norms = l.matrix().norm_squared() + m.matrix().norm_squared();
    Ok((norms - 2.0 * nuclear).max(0.0))
}

/// Adapted Bures–Wasserstein distance between the classes of `l` and `m`.
pub fn abw_distance(l: &LowerBlockFactor, m: &LowerBlockFactor) -> Result<f64> {
    abw_distance_sq(l, m).map(f64::sqrt)
}

/// Block rotation `O` minimizing `‖L − M O‖_F`; block `t` is the polar
/// factor of `(Mᵀ L)_{t,t}`.
pub fn abw_optimal_rotation(l: &LowerBlockFactor, m: &LowerBlockFactor) -> Result<BlockOrthogonal> {
    l.same_shape(m)?;
    let blocks = (0..l.steps())
        .map(|t| {
            let Procrustes { rotation, .. } = matcore::procrustes_align(&cross_gram(l, m, t));
            rotation
        })
        .collect();
    Ok(BlockOrthogonal::from_blocks_unchecked(l.d(), blocks))
}

/// `sqrt(Σ_t d²_BW(Σ̃_t^L, Σ̃_t^M))`, summed over `t` in index order.
pub fn abw_via_columns(l: &LowerBlockFactor, m: &LowerBlockFactor) -> Result<f64> {
    l.same_shape(m)?;
    let mut total = 0.0;
    for t in 0..l.steps() {
        let d = matcore::bw_distance(&l.column_covariance(t)?, &m.column_covariance(t)?)?;
        total += d * d;
    }
    Ok(total.sqrt())
}

/// Adapted 2-Wasserstein distance: `sqrt(‖a_X − a_Y‖² + d²_ABW)`.
pub fn aw2_distance(x: &GaussianProcess, y: &GaussianProcess) -> Result<f64> {
    let abw_sq = abw_distance_sq(x.factor(), y.factor())?;
    let mean_sq = (x.mean() - y.mean()).norm_squared();
    Ok((mean_sq + abw_sq).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn factor(d: usize, steps: usize, m: DMatrix<f64>) -> LowerBlockFactor {
        LowerBlockFactor::new(d, steps, m).unwrap()
    }

    fn pair() -> (LowerBlockFactor, LowerBlockFactor) {
        (
            factor(1, 2, dmatrix![1.0, 0.0; 0.5, 1.0]),
            factor(1, 2, dmatrix![1.0, 0.0; -0.5, 1.0]),
        )
    }

    /// Scalar-case oracle: per column, minimize over the two signs.
    fn sign_enumeration(l: &LowerBlockFactor, m: &LowerBlockFactor) -> f64 {
        (0..l.steps())
            .map(|t| {
                let a = l.truncated_column(t).unwrap().entries;
                let b = m.truncated_column(t).unwrap().entries;
                (&a - &b).norm_squared().min((&a + &b).norm_squared())
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn example_pair_distance() {
        let (l1, l2) = pair();
        let oracle = sign_enumeration(&l1, &l2);
        assert!((oracle - 1.0).abs() < 1e-15);
        assert!((abw_distance(&l1, &l2).unwrap() - oracle).abs() < 1e-9);
        assert!((abw_via_columns(&l1, &l2).unwrap() - 1.0).abs() < 1e-7);
        assert!(abw_distance(&l1, &l1).unwrap() < 1e-7);
        assert!(abw_via_columns(&l1, &l1).unwrap() < 1e-7);
    }

    #[test]
    fn scalar_distance() {
        let a = factor(1, 1, dmatrix![2.0]);
        let b = factor(1, 1, dmatrix![3.0]);
        assert!((abw_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_examples() {
        let (l1, l2) = pair();
        let eye = LowerBlockFactor::identity(1, 2);
        let o = abw_optimal_rotation(&eye, &l2).unwrap();
        assert!(o.blocks().iter().all(|b| b[(0, 0)] == 1.0));

        let neg = factor(1, 2, -l1.matrix().clone());
        let o = abw_optimal_rotation(&l1, &neg).unwrap();
        assert!(o.blocks().iter().all(|b| b[(0, 0)] == -1.0));

        let o = abw_optimal_rotation(&l1, &l1).unwrap();
        assert!(o.blocks().iter().all(|b| b[(0, 0)] == 1.0));
    }

    #[test]
    fn rotation_attains_distance() {
        let l = factor(2, 2, dmatrix![
            1.0, 0.2, 0.0, 0.0;
            -0.3, 0.9, 0.0, 0.0;
            0.5, 0.1, 1.1, 0.0;
            0.2, -0.4, 0.3, 0.7
        ]);
        let m = factor(2, 2, dmatrix![
            0.1, 1.0, 0.0, 0.0;
            0.8, -0.2, 0.0, 0.0;
            -0.4, 0.6, 0.0, 1.0;
            0.3, 0.3, -0.9, 0.2
        ]);
        let o = abw_optimal_rotation(&l, &m).unwrap();
        let rotated = m.right_mul(&o).unwrap();
        let gap = (l.matrix() - rotated.matrix()).norm();
        let d = abw_distance(&l, &m).unwrap();
        assert!((gap - d).abs() < 1e-10 * (1.0 + d), "{gap} vs {d}");
        assert!((abw_via_columns(&l, &m).unwrap() - d).abs() < 1e-7);
    }

    #[test]
    fn aw2_examples() {
        let (l1, l2) = pair();
        let x = GaussianProcess::centered(l1.clone());
        let y = GaussianProcess::centered(l2);
        assert!(aw2_distance(&x, &x).unwrap() < 1e-7);
        assert!((aw2_distance(&x, &y).unwrap() - 1.0).abs() < 1e-9);

        let shifted = GaussianProcess::new(dvector![3.0, 4.0], l1).unwrap();
        assert!((aw2_distance(&x, &shifted).unwrap() - 5.0).abs() < 1e-7);
    }

    #[test]
    fn shape_mismatch() {
        let a = LowerBlockFactor::identity(1, 2);
        let b = LowerBlockFactor::identity(1, 3);
        assert!(abw_distance(&a, &b).is_err());
        assert!(abw_via_columns(&a, &b).is_err());
        assert!(abw_optimal_rotation(&a, &b).is_err());
    }
}
