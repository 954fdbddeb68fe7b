//! Deterministic numerical primitives: dense vectors and matrices, the seeded
//! random stream, geometric sampling and Bregman divergences.

mod bregman;
mod matrix;
mod rng;
mod stats;
mod vector;

pub use bregman::bregman;
pub use matrix::{Cholesky, DenseMatrix, SymmetricEigen};
pub use rng::{SeededRng, RNG_ALGORITHM};
pub use stats::{chi_square_geometric, chi_square_two_sample, geometric_cdf, ks_distance_geometric};
pub use vector::DenseVector;

use crate::{Real, Result};

/// Samples `k >= 1` with `P(k) = (1 - p)^(k-1) p`.
pub fn sample_geometric(rng: &mut SeededRng, p: f64) -> Result<u64> {
    rng.geometric(p)
}

/// Largest singular value of `m`.
pub fn spectral_norm<T: Real>(m: &DenseMatrix<T>) -> Result<T> {
    m.spectral_norm()
}
