use serde::{Deserialize, Serialize};

use crate::oracle::Problem;
use crate::{Error, Real, Result};

/// Step size and epoch-termination probability of the sliding epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrsHyper {
    pub theta: f64,
    pub p: f64,
}

impl SvrsHyper {
    pub fn new(theta: f64, p: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self { theta, p })
    }
}

/// Hyperparameters of the accelerated method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccHyper {
    pub theta: f64,
    pub p: f64,
    pub tau: f64,
    pub alpha: f64,
}

impl AccHyper {
    /// Enforces `2ταp ≤ θ` (up to rounding: the defaults meet it with equality).
    pub fn new(theta: f64, p: f64, tau: f64, alpha: f64) -> Result<Self> {
        SvrsHyper::new(theta, p)?;
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidParameter(format!("tau must lie in (0, 1], got {tau}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if 2.0 * tau * alpha * p > theta * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "2·tau·alpha·p = {} exceeds theta = {theta}",
                2.0 * tau * alpha * p
            )));
        }
        Ok(Self { theta, p, tau, alpha })
    }

    pub fn svrs(&self) -> SvrsHyper {
        SvrsHyper { theta: self.theta, p: self.p }
    }

    /// Interpolation scaled to `s·τ` (capped at 1), with `α = √n/(8δτ)` recomputed.
    pub fn with_tau_scale(self, s: f64, n: usize, delta: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("tau scale must be positive, got {s}")));
        }
        let tau = (s * self.tau).min(1.0);
        let alpha = (n as f64).sqrt() / (8.0 * delta * tau);
        Self::new(self.theta, self.p, tau, alpha)
    }
}

/// `θ = 1/(4√n δ)`, `p = 1/n`.
pub fn default_svrs_hyper<T: Real>(problem: &Problem<T>) -> Result<SvrsHyper> {
    svrs_hyper_for(problem.n(), problem.delta().as_f64())
}

pub fn svrs_hyper_for(n: usize, delta: f64) -> Result<SvrsHyper> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let nf = n as f64;
    SvrsHyper::new(1.0 / (4.0 * nf.sqrt() * delta), 1.0 / nf)
}

/// Adds `τ = ¼ min{1, (n^{1/4}/2) sqrt(μ/δ)}` and `α = √n/(8δτ)`.
pub fn default_acc_hyper<T: Real>(problem: &Problem<T>) -> Result<AccHyper> {
    acc_hyper_for(problem.n(), problem.delta().as_f64(), problem.mu().as_f64())
}

pub fn acc_hyper_for(n: usize, delta: f64, mu: f64) -> Result<AccHyper> {
    if !(mu > 0.0 && delta >= mu) {
        return Err(Error::InvalidParameter(format!("need delta >= mu > 0, got delta={delta}, mu={mu}")));
    }
    let base = svrs_hyper_for(n, delta)?;
    let nf = n as f64;
    let tau = 0.25 * (nf.powf(0.25) / 2.0 * (mu / delta).sqrt()).min(1.0);
    let alpha = nf.sqrt() / (8.0 * delta * tau);
    AccHyper::new(base.theta, base.p, tau, alpha)
}

/// Default proximal step of the point-method baseline: `μ/(2δ²)`.
pub fn default_svrp_theta<T: Real>(problem: &Problem<T>) -> f64 {
    let mu = problem.mu().as_f64();
    let delta = problem.delta().as_f64();
    mu / (2.0 * delta * delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Svrs,
    AccSvrs,
    Loopless,
}

/// Iteration count from the convergence theorems, before the ceiling.
pub fn iteration_bound(which: Method, n: usize, delta: f64, mu: f64, gap0: f64, eps: f64) -> f64 {
    let nf = n as f64;
    let r = delta / mu;
    let (factor, log_arg) = match which {
        Method::Svrs => ((5.0 * r / nf.sqrt()).max(2.0), 3.0 * (1.0 + r / nf.sqrt()) * gap0 / eps),
        Method::AccSvrs => ((8.0 * nf.powf(-0.25) * r.sqrt()).max(4.0), 2.0 * gap0 / eps),
        Method::Loopless => ((11.0 * nf.sqrt() * r).max(2.0 * nf), 3.0 * (1.0 + r / nf.sqrt()) * gap0 / eps),
    };
    factor * log_arg.ln().max(0.0)
}

/// Ceiling of the theorem's iteration count.
pub fn predicted_iterations<T: Real>(problem: &Problem<T>, which: Method, gap0: f64, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && gap0 > 0.0) {
        return Err(Error::InvalidParameter(format!("need eps > 0 and gap0 > 0, got {eps}, {gap0}")));
    }
    let k = iteration_bound(which, problem.n(), problem.delta().as_f64(), problem.mu().as_f64(), gap0, eps);
    Ok(k.ceil() as u64)
}
