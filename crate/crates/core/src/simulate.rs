//! Seeded path simulation and second-order statistics.
//!
//! Noise comes from a ChaCha20 stream (`rand_chacha::ChaCha20Rng`) seeded
//! with [`SeedableRng::seed_from_u64`]. Standard normals are produced by the
//! Box–Muller transform: each pair of uniforms `u₁ ∈ (0, 1]`, `u₂ ∈ [0, 1)`
//! yields `sqrt(−2 ln u₁)·cos(2π u₂)` and `sqrt(−2 ln u₁)·sin(2π u₂)`, filled
//! row-major into the `n_paths × dT` noise matrix. The same
//! `(seed, n_paths, dT)` therefore always gives the same noise, which can be
//! shared across processes with [`sample_paths_with_noise`].

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{AbwError, Result};
use crate::process::{GaussianProcess, LowerBlockFactor};

/// Fills `out` with independent standard normals (Box–Muller).
pub fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = box_muller(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = box_muller(rng).0;
    }
}

fn box_muller<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let radius = (-2.0 * u1.ln()).sqrt();
    let (sin, cos) = (std::f64::consts::TAU * u2).sin_cos();
    (radius * cos, radius * sin)
}

/// `n_paths × dim` matrix of standard normals, determined by `seed`.
pub fn draw_noise(seed: u64, n_paths: usize, dim: usize) -> DMatrix<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut data = vec![0.0; n_paths * dim];
    fill_standard_normal(&mut rng, &mut data);
    DMatrix::from_row_slice(n_paths, dim, &data)
}

/// Rows `a + L g` for each noise row `g`.
pub fn sample_paths_with_noise(
    process: &GaussianProcess,
    noise: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let factor = process.factor();
    if noise.ncols() != factor.dim() {
        return Err(AbwError::DimensionMismatch {
            what: "noise columns vs d*T",
            left: noise.ncols(),
            right: factor.dim(),
        });
    }
    let mut paths = noise * factor.matrix().transpose();
    let mean = process.mean().transpose();
    for mut row in paths.row_iter_mut() {
        row += &mean;
    }
    Ok(paths)
}

/// `n_paths` sample paths of `process` driven by [`draw_noise`]`(seed, …)`.
pub fn sample_paths(process: &GaussianProcess, n_paths: usize, seed: u64) -> DMatrix<f64> {
    let noise = draw_noise(seed, n_paths, process.factor().dim());
    sample_paths_with_noise(process, &noise).expect("noise sized from the process")
}

/// Per-step variance `(L Lᵀ)_{t,t}`; for `d > 1` the trace of the diagonal
/// block, `Σ_s ‖L_{t,s}‖²_F`.
pub fn marginal_variances(factor: &LowerBlockFactor) -> Vec<f64> {
    (0..factor.steps())
        .map(|t| {
            (0..=t)
                .map(|s| factor.block(t, s).norm_squared())
                .sum()
        })
        .collect()
}

/// `Cov(X_0, X_t) = (L Lᵀ)_{t,0}` for scalar processes.
pub fn lag_covariance(factor: &LowerBlockFactor) -> Result<Vec<f64>> {
    if factor.d() != 1 {
        return Err(AbwError::DimensionNotScalar { d: factor.d() });
    }
    let m = factor.matrix();
    Ok((0..factor.steps()).map(|t| m[(t, 0)] * m[(0, 0)]).collect())
}

/// Unbiased sample covariance of the rows of `paths`.
pub fn empirical_covariance(paths: &DMatrix<f64>) -> DMatrix<f64> {
    let n = paths.nrows();
    let mean: DVector<f64> = paths.row_mean().transpose();
    let mut centered = paths.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    centered.transpose() * &centered / (n.saturating_sub(1).max(1) as f64)
}
