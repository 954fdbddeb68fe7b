use serde::{Deserialize, Serialize};

use super::{assemble_ridge, DeltaSource, RidgeComponent};
use crate::numkit::{DenseMatrix, SeededRng};
use crate::oracle::Problem;
use crate::{Error, Real, Result};

/// Similarity-controlled ridge instance: `Z_i = Z_0 + N_i + shift_i I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub d: usize,
    pub n: usize,
    pub base_norm: f64,
    pub perturb_norm: f64,
    pub mu: f64,
    pub seed: u64,
    pub delta_source: DeltaSource,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { d: 100, n: 400, base_norm: 3000.0, perturb_norm: 30.0, mu: 0.1, seed: 0, delta_source: DeltaSource::Paper }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("d and n must be positive".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.base_norm >= 0.0 && self.perturb_norm >= 0.0) {
            return Err(Error::InvalidParameter("norms must be nonnegative".into()));
        }
        Ok(())
    }
}

/// `G + Gᵀ` with standard normal `G`, rescaled to spectral norm `target`.
fn random_symmetric<T: Real>(rng: &mut SeededRng, d: usize, target: f64) -> Result<DenseMatrix<T>> {
    let mut m = DenseMatrix::<T>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = T::lit(rng.normal());
        }
    }
    let s = m.add(&m.transpose());
    let norm = s.spectral_norm()?;
    if target == 0.0 || norm == T::zero() {
        return Ok(DenseMatrix::zeros(d, d));
    }
    Ok(s.scaled(T::lit(target) / norm))
}

/// Builds the synthetic ridge problem. Labels are standard normal; all draws
/// come from one stream seeded by `spec.seed`.
pub fn gen_synthetic<T: Real>(spec: &SyntheticSpec) -> Result<Problem<T>> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let d = spec.d;
    let z0 = random_symmetric::<T>(&mut rng, d, spec.base_norm)?;
    let mut zs = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let zi = z0.add(&random_symmetric(&mut rng, d, spec.perturb_norm)?);
        let lmin = zi.symmetric_eigen()?.min();
        let zi = if lmin < T::zero() { zi.add_diag(-lmin) } else { zi };
        zs.push(zi);
    }
    let mut comps = Vec::with_capacity(spec.n);
    for z in &zs {
        comps.push(RidgeComponent::new(z.clone(), rng.normal_vector(d), T::lit(spec.mu))?);
    }
    let delta_paper = paper_delta(&zs)?;
    assemble_ridge(comps, T::lit(spec.mu), delta_paper, spec.delta_source, "synthetic", Some(spec.seed))
}

/// `sqrt((1/n) Σ ||Z_i - Z̄||²)` over the feature matrices.
pub fn paper_delta<T: Real>(zs: &[DenseMatrix<T>]) -> Result<T> {
    let n = T::from_usize_lossy(zs.len());
    let first = zs.first().ok_or_else(|| Error::InvalidParameter("no feature matrices".into()))?;
    let mut mean = DenseMatrix::zeros(first.rows(), first.cols());
    for z in zs {
        mean = mean.add(z);
    }
    let mean = mean.scaled(T::one() / n);
    let mut acc = T::zero();
    for z in zs {
        let s = z.sub(&mean).spectral_norm()?;
        acc += s * s;
    }
    Ok((acc / n).sqrt())
}
