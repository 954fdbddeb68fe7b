use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::DenseVector;
use crate::{Error, Real, Result};

/// Name of the generator behind [`SeededRng`]; written into run metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Seeded, platform-independent random stream.
///
/// Every random choice made by a solver (inner-loop length, sampled clients,
/// anchor coin flips) is drawn from one of these, so a seed fully determines a run.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream derived from `seed` and a stream label.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn normal_vector<T: Real>(&mut self, dim: usize) -> DenseVector<T> {
        (0..dim).map(|_| T::lit(self.normal())).collect()
    }

    /// Uniform on the unit sphere `S^{dim-1}`.
    pub fn unit_sphere<T: Real>(&mut self, dim: usize) -> DenseVector<T> {
        loop {
            let g: DenseVector<T> = self.normal_vector(dim);
            let norm = g.norm();
            if norm > T::zero() {
                return g.scaled(T::one() / norm);
            }
        }
    }

    /// Uniform in the centered ball of the given radius.
    pub fn ball<T: Real>(&mut self, dim: usize, radius: f64) -> DenseVector<T> {
        let dir: DenseVector<T> = self.unit_sphere(dim);
        let r = radius * self.uniform().powf(1.0 / dim as f64);
        dir.scaled(T::lit(r))
    }

    /// Number of Bernoulli(`p`) trials up to and including the first success.
    ///
    /// Inverse-CDF: `ceil(ln U / ln(1 - p))` with `U` uniform on `(0, 1]`.
    pub fn geometric(&mut self, p: f64) -> Result<u64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        if p == 1.0 {
            return Ok(1);
        }
        let u = self.uniform_open0();
        let k = (u.ln() / (-p).ln_1p()).ceil();
        // u == 1 gives k == 0; the support starts at 1
        Ok(if k < 1.0 { 1 } else if k >= u64::MAX as f64 { u64::MAX } else { k as u64 })
    }
}
