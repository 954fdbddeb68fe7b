use serde::Serialize;

use super::{finish, new_trace, record, RunOptions, RunTrace};
use crate::netsim::NetProblem;
use crate::numkit::{DenseVector, SeededRng};
use crate::{Error, Real, Result};

#[derive(Serialize)]
struct SvrpHyper {
    theta: f64,
    p: f64,
}

/// Variance-reduced stochastic proximal point with a loopless anchor: each
/// iteration applies `x⁺ = prox_{f_i}^θ(x + θ(∇f_i(w) - ∇f(w)))` on a sampled
/// client, and with probability `p` the anchor `w` moves to `x⁺`.
pub fn svrp<T: Real>(
    np: &mut NetProblem<'_, T>,
    x0: &DenseVector<T>,
    theta: f64,
    p: f64,
    opts: &RunOptions,
    rng: &mut SeededRng,
) -> Result<RunTrace> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let (mut trace, certs) = new_trace("svrp", np, rng, &SvrpHyper { theta, p }, opts)?;
    x0.check_dim(np.problem().dim())?;
    let mut x = x0.clone();
    np.broadcast_full_gradient(&x)?;
    record(&mut trace, np, 0, &x)?;
    let n = np.n();
    let mut k = 0;
    while !opts.done(&trace) {
        let w = np.anchor_point().cloned().unwrap_or_else(|| x.clone());
        np.mark_round(&[&x, &w]);
        let i = rng.index(n);
        x = svrp_step(np, i, &x, T::lit(theta))?;
        if rng.bernoulli(p) {
            np.broadcast_full_gradient(&x)?;
        }
        k += 1;
        record(&mut trace, np, k, &x)?;
    }
    let w = np.anchor_point().cloned().unwrap_or_else(|| x.clone());
    np.mark_round(&[&x, &w]);
    Ok(finish(trace, certs))
}

/// One proximal step on client `i` against the current anchor.
pub(crate) fn svrp_step<T: Real>(
    np: &mut NetProblem<'_, T>,
    i: usize,
    x: &DenseVector<T>,
    theta: T,
) -> Result<DenseVector<T>> {
    let g = np.anchor_correction(i)?;
    let mut shifted = x.clone();
    shifted.axpy(theta, &g);
    np.sample_component_prox(i, &shifted, theta)
}
