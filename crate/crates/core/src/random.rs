//! Random factors, rotations and weights.
//!
//! Used for solver initializations and for property checks. All generators
//! take the caller's RNG so sequences stay reproducible.

use nalgebra::DMatrix;
use rand::Rng;

use crate::process::{Ar1Spec, BlockOrthogonal, LowerBlockFactor};
use crate::simulate::fill_standard_normal;

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut data = vec![0.0; rows * cols];
    fill_standard_normal(rng, &mut data);
    DMatrix::from_vec(rows, cols, data)
}

/// Factor with independent standard normal entries in every lower block.
pub fn gaussian_factor<R: Rng + ?Sized>(rng: &mut R, d: usize, steps: usize) -> LowerBlockFactor {
    let n = d * steps;
    LowerBlockFactor::from_lower_part(d, steps, gaussian_matrix(rng, n, n))
        .expect("shape built from d and steps")
}

/// Regular factor: diagonal blocks `c I + 0.2 Z` with `c ~ U(0.8, 1.5)`,
/// off-diagonal blocks `0.5 Z`, `Z` standard normal.
pub fn regular_factor<R: Rng + ?Sized>(rng: &mut R, d: usize, steps: usize) -> LowerBlockFactor {
    let n = d * steps;
    let mut m = gaussian_matrix(rng, n, n) * 0.5;
    for t in 0..steps {
        let scale = rng.random_range(0.8..1.5);
        let block = DMatrix::identity(d, d) * scale + gaussian_matrix(rng, d, d) * 0.2;
        m.view_mut((t * d, t * d), (d, d)).copy_from(&block);
    }
    LowerBlockFactor::from_lower_part(d, steps, m).expect("shape built from d and steps")
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal folded into `Q`).
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, d, d).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn block_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize, steps: usize) -> BlockOrthogonal {
    BlockOrthogonal::from_blocks_unchecked(d, (0..steps).map(|_| orthogonal(rng, d)).collect())
}

/// Convex weights with entries drawn from `U(0.1, 1.1)` before normalization.
pub fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// AR(1) spec with `α_t ~ U(alpha)` and `σ_t ~ U(sigma)`, time-varying.
pub fn ar1_spec<R: Rng + ?Sized>(
    rng: &mut R,
    steps: usize,
    alpha: std::ops::Range<f64>,
    sigma: std::ops::Range<f64>,
) -> Ar1Spec {
    let alphas = (0..steps).map(|_| rng.random_range(alpha.clone())).collect();
    let sigmas = (0..steps).map(|_| rng.random_range(sigma.clone())).collect();
    Ar1Spec::new(alphas, sigmas).expect("sigma range must be positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_blocks_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..5 {
            let o = block_orthogonal(&mut rng, d, 3);
            assert!(BlockOrthogonal::new(o.blocks().to_vec()).is_ok());
        }
    }

    #[test]
    fn regular_factors_are_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            assert!(regular_factor(&mut rng, 2, 4).is_regular(None));
        }
    }

    #[test]
    fn weights_are_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = weights(&mut rng, 6);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }
}
