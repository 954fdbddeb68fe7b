use super::{finish, new_trace, record, solve_inner, InnerSolveSpec, RunOptions, RunTrace, SvrsHyper};
use crate::netsim::NetProblem;
use crate::numkit::{DenseVector, SeededRng};
use crate::{Real, Result};

/// Single-loop sliding: one proximal step per iteration, and with probability
/// `p` the anchor jumps to the new point and its full gradient is broadcast.
/// Records the anchor `w_k` after every iteration.
pub fn loopless_svrs<T: Real>(
    np: &mut NetProblem<'_, T>,
    x0: &DenseVector<T>,
    hyper: &SvrsHyper,
    inner: &InnerSolveSpec,
    opts: &RunOptions,
    rng: &mut SeededRng,
) -> Result<RunTrace> {
    let (mut trace, mut certs) = new_trace("loopless", np, rng, hyper, opts)?;
    x0.check_dim(np.problem().dim())?;
    let theta = T::lit(hyper.theta);
    let n = np.n();
    let mut x = x0.clone();
    let mut w = x0.clone();
    np.broadcast_full_gradient(&w)?;
    record(&mut trace, np, 0, &w)?;
    let mut k = 0;
    while !opts.done(&trace) {
        np.mark_round(&[&x, &w]);
        let i = rng.index(n);
        let g = np.anchor_correction(i)?;
        let mut v = np.sample_component_gradient(i, &x)?;
        v -= &np.master_gradient(&x)?;
        v -= &g;
        x = solve_inner(np, &x, &v, theta, inner, &mut certs)?;
        if rng.bernoulli(hyper.p) {
            w = x.clone();
            np.broadcast_full_gradient(&w)?;
        }
        k += 1;
        record(&mut trace, np, k, &w)?;
    }
    np.mark_round(&[&x, &w]);
    Ok(finish(trace, certs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::CountingMode;
    use crate::problems::{gen_synthetic, SyntheticSpec};

    #[test]
    fn always_refreshing_anchor_costs_a_broadcast_per_step() {
        let spec = SyntheticSpec { d: 4, n: 5, base_norm: 2.0, perturb_norm: 0.2, mu: 0.5, seed: 3, ..Default::default() };
        let p = gen_synthetic::<f64>(&spec).unwrap();
        let hyper = SvrsHyper::new(default_theta(&p), 1.0).unwrap();
        let inner = InnerSolveSpec::exact(&p).unwrap();
        let mut np = NetProblem::new(&p, CountingMode::Paper);
        let t = loopless_svrs(&mut np, &DenseVector::zeros(4), &hyper, &inner, &RunOptions::iters(7), &mut SeededRng::new(1))
            .unwrap();
        assert_eq!(t.records.len(), 8);
        assert_eq!(t.last().unwrap().comm, 8 * 8 + 7 * 2);
        let gaps: Vec<f64> = t.records.iter().map(|r| r.f_gap.unwrap()).collect();
        assert!(gaps[7] < gaps[0]);
    }

    fn default_theta(p: &crate::oracle::Problem<f64>) -> f64 {
        super::super::default_svrs_hyper(p).unwrap().theta
    }
}
