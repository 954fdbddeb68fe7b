//! Finite-sum problems `f = (1/n) Σ f_i` as a list of component oracles plus
//! the metadata the solvers need up front (strong convexity, similarity modulus).

mod component;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use component::{prox_residual, ComponentOracle, QuadraticComponent};

use crate::numkit::{DenseMatrix, DenseVector, SeededRng};
use crate::{Error, Real, Result};

/// Known minimizer of a problem.
#[derive(Clone, Debug)]
pub struct Optimum<T> {
    pub x: DenseVector<T>,
    pub value: T,
    /// Mean Hessian for quadratic problems; lets the gap be evaluated as
    /// `½ (x - x*)ᵀ H (x - x*)` without cancellation.
    pub mean_hessian: Option<DenseMatrix<T>>,
}

/// Serializable problem summary (`problem.json`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemDescriptor {
    pub kind: String,
    pub d: usize,
    pub n: usize,
    pub mu: f64,
    pub delta_paper: Option<f64>,
    pub delta_exact: Option<f64>,
    #[serde(rename = "L")]
    pub smoothness: Option<f64>,
    pub seed: Option<u64>,
}

pub type SharedComponent<T> = Arc<dyn ComponentOracle<T>>;

pub struct Problem<T: Real> {
    components: Vec<SharedComponent<T>>,
    dim: usize,
    mu: T,
    delta: T,
    master: usize,
    smoothness: Option<Vec<T>>,
    optimum: Option<Optimum<T>>,
    descriptor: ProblemDescriptor,
}

impl<T: Real> Clone for Problem<T> {
    fn clone(&self) -> Self {
        Self {
            components: self.components.clone(),
            dim: self.dim,
            mu: self.mu,
            delta: self.delta,
            master: self.master,
            smoothness: self.smoothness.clone(),
            optimum: self.optimum.clone(),
            descriptor: self.descriptor.clone(),
        }
    }
}

impl<T: Real> std::fmt::Debug for Problem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("n", &self.n())
            .field("dim", &self.dim)
            .field("mu", &self.mu)
            .field("delta", &self.delta)
            .field("master", &self.master)
            .finish()
    }
}

impl<T: Real> Problem<T> {
    /// `delta` is the declared average second-order similarity modulus; the
    /// solvers take step sizes from it.
    pub fn new(components: Vec<SharedComponent<T>>, mu: T, delta: T) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("a problem needs at least one component".into()))?;
        let dim = first.dim();
        for c in &components {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c.dim() });
            }
        }
        if !(mu > T::zero()) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        if !(delta >= mu) {
            return Err(Error::InvalidParameter(format!("delta ({delta}) must be at least mu ({mu})")));
        }
        let descriptor = ProblemDescriptor {
            kind: "custom".into(),
            d: dim,
            n: components.len(),
            mu: mu.as_f64(),
            ..Default::default()
        };
        let smoothness: Option<Vec<T>> = components.iter().map(|c| c.smoothness()).collect();
        Ok(Self { components, dim, mu, delta, master: 0, smoothness, optimum: None, descriptor })
    }

    pub fn with_master(mut self, master: usize) -> Result<Self> {
        self.check_index(master)?;
        self.master = master;
        Ok(self)
    }

    pub fn with_optimum(mut self, optimum: Optimum<T>) -> Result<Self> {
        optimum.x.check_dim(self.dim)?;
        self.optimum = Some(optimum);
        Ok(self)
    }

    pub fn with_descriptor(mut self, descriptor: ProblemDescriptor) -> Self {
        self.descriptor = descriptor;
        self
    }

    /// Replaces the declared similarity modulus.
    pub fn with_delta(mut self, delta: T) -> Result<Self> {
        if !(delta >= self.mu) {
            return Err(Error::InvalidParameter(format!("delta ({delta}) must be at least mu ({})", self.mu)));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// 0-based index of the master node.
    pub fn master(&self) -> usize {
        self.master
    }

    pub fn component(&self, i: usize) -> &dyn ComponentOracle<T> {
        self.components[i].as_ref()
    }

    pub fn components(&self) -> &[SharedComponent<T>] {
        &self.components
    }

    pub fn smoothness(&self) -> Option<&[T]> {
        self.smoothness.as_deref()
    }

    pub fn max_smoothness(&self) -> Option<T> {
        self.smoothness.as_ref().map(|ls| ls.iter().fold(T::zero(), |m, &l| m.max(l)))
    }

    pub fn optimum(&self) -> Option<&Optimum<T>> {
        self.optimum.as_ref()
    }

    pub fn descriptor(&self) -> &ProblemDescriptor {
        &self.descriptor
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n() })
        }
    }

    pub fn full_value(&self, x: &DenseVector<T>) -> Result<T> {
        x.check_dim(self.dim)?;
        let total: T = self.components.iter().map(|c| c.value(x)).sum();
        Ok(total / T::from_usize_lossy(self.n()))
    }

    pub fn full_gradient(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        x.check_dim(self.dim)?;
        let mut g = DenseVector::zeros(self.dim);
        for c in &self.components {
            g += &c.gradient(x);
        }
        g.scale_mut(T::one() / T::from_usize_lossy(self.n()));
        Ok(g)
    }

    /// Hessians of every component, when all are quadratic.
    pub fn hessians(&self) -> Option<Vec<DenseMatrix<T>>> {
        self.components.iter().map(|c| c.hessian()).collect()
    }

    /// `f(x) - f(x*)`, when the optimum is known.
    pub fn f_gap(&self, x: &DenseVector<T>) -> Option<T> {
        let opt = self.optimum.as_ref()?;
        match &opt.mean_hessian {
            Some(h) => {
                let e = x - &opt.x;
                Some(T::lit(0.5) * e.dot(&h.matvec(&e)))
            }
            None => self.full_value(x).ok().map(|v| v - opt.value),
        }
    }

    pub fn dist_sq_to_opt(&self, x: &DenseVector<T>) -> Option<T> {
        self.optimum.as_ref().map(|o| x.dist_sq(&o.x))
    }

    /// Sampled lower estimate of the average second-order similarity modulus:
    /// the largest `sqrt((1/n) Σ ||∇(f_i - f)(x) - ∇(f_i - f)(y)||²) / ||x - y||`
    /// over random pairs drawn uniformly from the radius-10 ball.
    ///
    /// The modulus is a supremum, so this is only a certified lower bound.
    pub fn measure_avess(&self, trials: usize, rng: &mut SeededRng) -> T {
        let mut best = T::zero();
        for _ in 0..trials.max(1) {
            let x: DenseVector<T> = rng.ball(self.dim, 10.0);
            let y: DenseVector<T> = rng.ball(self.dim, 10.0);
            if let Some(ratio) = self.avess_ratio(&x, &y) {
                best = best.max(ratio.sqrt());
            }
        }
        best
    }

    /// `(1/n) Σ ||∇(f_i - f)(x) - ∇(f_i - f)(y)||² / ||x - y||²` for one pair.
    pub fn avess_ratio(&self, x: &DenseVector<T>, y: &DenseVector<T>) -> Option<T> {
        let denom = x.dist_sq(y);
        if !(denom > T::zero()) {
            return None;
        }
        let diffs: Vec<DenseVector<T>> =
            self.components.iter().map(|c| &c.gradient(x) - &c.gradient(y)).collect();
        let mut mean = DenseVector::zeros(self.dim);
        for d in &diffs {
            mean += d;
        }
        mean.scale_mut(T::one() / T::from_usize_lossy(self.n()));
        let total: T = diffs.iter().map(|d| d.dist_sq(&mean)).sum();
        Some(total / T::from_usize_lossy(self.n()) / denom)
    }

    /// Largest `||∇(f_i - f)(x) - ∇(f_i - f)(y)|| / ||x - y||` over components
    /// and sampled pairs: a lower estimate of the per-component similarity modulus.
    pub fn measure_component_ss(&self, trials: usize, rng: &mut SeededRng) -> T {
        let mut best = T::zero();
        for _ in 0..trials.max(1) {
            let x: DenseVector<T> = rng.ball(self.dim, 10.0);
            let y: DenseVector<T> = rng.ball(self.dim, 10.0);
            let dist = x.dist_sq(&y).sqrt();
            if !(dist > T::zero()) {
                continue;
            }
            let diffs: Vec<DenseVector<T>> =
                self.components.iter().map(|c| &c.gradient(&x) - &c.gradient(&y)).collect();
            let mut mean = DenseVector::zeros(self.dim);
            for d in &diffs {
                mean += d;
            }
            mean.scale_mut(T::one() / T::from_usize_lossy(self.n()));
            for d in &diffs {
                best = best.max(d.dist_sq(&mean).sqrt() / dist);
            }
        }
        best
    }
}

/// Exact average Hessian similarity `||(1/n) Σ (H_i - H̄)²||^{1/2}` of quadratic components.
pub fn exact_avess_quadratic<T: Real>(hessians: &[DenseMatrix<T>]) -> Result<T> {
    let first = hessians
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one Hessian".into()))?;
    let d = first.rows();
    for h in hessians {
        h.check_symmetric()?;
        if h.rows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: h.rows() });
        }
    }
    let n = T::from_usize_lossy(hessians.len());
    let mut mean = DenseMatrix::zeros(d, d);
    for h in hessians {
        mean = mean.add(h);
    }
    let mean = mean.scaled(T::one() / n);
    let mut acc = DenseMatrix::zeros(d, d);
    for h in hessians {
        let dev = h.sub(&mean);
        acc = acc.add(&dev.matmul(&dev));
    }
    let acc = acc.scaled(T::one() / n);
    // symmetrize away round-off before the eigen solve
    let acc = acc.add(&acc.transpose()).scaled(T::lit(0.5));
    Ok(acc.spectral_norm()?.sqrt())
}

/// Exact per-component similarity `max_i ||H_i - H̄||` of quadratic components.
pub fn exact_ss_quadratic<T: Real>(hessians: &[DenseMatrix<T>]) -> Result<T> {
    let first = hessians
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one Hessian".into()))?;
    let d = first.rows();
    let n = T::from_usize_lossy(hessians.len());
    let mut mean = DenseMatrix::zeros(d, d);
    for h in hessians {
        h.check_symmetric()?;
        mean = mean.add(h);
    }
    let mean = mean.scaled(T::one() / n);
    let mut worst = T::zero();
    for h in hessians {
        worst = worst.max(h.sub(&mean).spectral_norm()?);
    }
    Ok(worst)
}
