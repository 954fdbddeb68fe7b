use super::{finish, new_trace, record, svrs_epoch, AccHyper, InnerSolveSpec, RunOptions, RunTrace};
use crate::netsim::NetProblem;
use crate::numkit::{DenseVector, SeededRng};
use crate::{Real, Result};

/// `p[(∇f_1 - ∇f_j)(x) - (∇f_1 - ∇f_j)(y) + (x - y)/θ]`, the one-client
/// estimate of `p(∇h(x) - ∇h(y))` for `h = f_1 + ||·||²/(2θ) - f`.
pub fn coupling_gradient<T: Real>(
    np: &mut NetProblem<'_, T>,
    j: usize,
    x: &DenseVector<T>,
    y: &DenseVector<T>,
    hyper: &AccHyper,
) -> Result<DenseVector<T>> {
    let (gjx, gjy) = np.exchange_pair(j, x, y)?;
    let mut g = np.master_gradient(x)?;
    g -= &np.master_gradient(y)?;
    g -= &gjx;
    g += &gjy;
    g.axpy(T::one() / T::lit(hyper.theta), &(x - y));
    g.scale_mut(T::lit(hyper.p));
    Ok(g)
}

/// Accelerated sliding: interpolate `x = τz + (1-τ)y`, run one epoch from `x`
/// to get the new `y`, then take a mirror-style step on `z` with the coupling
/// gradient from one sampled client. Records `y_k`.
pub fn accsvrs<T: Real>(
    np: &mut NetProblem<'_, T>,
    y0: &DenseVector<T>,
    hyper: &AccHyper,
    inner: &InnerSolveSpec,
    opts: &RunOptions,
    rng: &mut SeededRng,
) -> Result<RunTrace> {
    let (mut trace, mut certs) = new_trace("accsvrs", np, rng, hyper, opts)?;
    y0.check_dim(np.problem().dim())?;
    let svrs_hyper = hyper.svrs();
    let tau = T::lit(hyper.tau);
    let alpha = T::lit(hyper.alpha);
    let c = T::lit(0.3) * np.problem().mu() * alpha;
    let n = np.n();
    let mut y = y0.clone();
    let mut z = y0.clone();
    record(&mut trace, np, 0, &y)?;
    let mut k = 0;
    while !opts.done(&trace) {
        let x = DenseVector::lincomb(tau, &z, T::one() - tau, &y);
        let y_next = svrs_epoch(np, &x, &svrs_hyper, inner, rng, None, &[&y, &z], &mut certs)?.x;
        let j = rng.index(n);
        let g = coupling_gradient(np, j, &x, &y_next, hyper)?;
        z.axpy(c, &y_next);
        z.axpy(-alpha, &g);
        z.scale_mut(T::one() / (T::one() + c));
        y = y_next;
        k += 1;
        record(&mut trace, np, k, &y)?;
    }
    np.mark_round(&[&y, &z]);
    Ok(finish(trace, certs))
}
