//! Adapted Bures–Wasserstein geometry for discrete-time Gaussian processes.
//!
//! A process on `T` steps of dimension `d` is written `X = a + L G`, where `G`
//! stacks `T` independent standard normal vectors and `L` is block-lower
//! triangular. Two factors describe the same law exactly when they differ by
//! a right multiplication with a block-diagonal orthogonal matrix, so every
//! quantity in this crate is invariant under that action.
//!
//! Modules:
//!
//! - [`matcore`]: symmetric PSD square roots, classical Bures–Wasserstein
//!   distance, Procrustes alignment, PSD factorization.
//! - [`process`]: factors, truncated columns, column covariances, AR(1)
//!   constructors and the JSON file formats.
//! - [`metrics`]: adapted distances and optimal block rotations.
//! - [`barycenter`]: the alternating fixed-point solver, the per-column
//!   solver, the classical barycenter and the scalar sign oracle.
//! - [`simulate`]: seeded path simulation and second-order statistics.
//! - [`random`]: random factors and rotations for initializations and tests.

pub mod barycenter;
pub mod error;
pub mod matcore;
pub mod metrics;
pub mod process;
pub mod random;
pub mod simulate;

pub use error::{AbwError, Result};
pub use process::{BlockOrthogonal, GaussianProcess, LowerBlockFactor};
