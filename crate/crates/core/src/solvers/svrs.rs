use super::{finish, new_trace, record, solve_inner, CertificateLog, InnerSolveSpec, RunOptions, RunTrace, SvrsHyper};
use crate::netsim::NetProblem;
use crate::numkit::{DenseVector, SeededRng};
use crate::{Real, Result};

#[derive(Clone, Debug)]
pub struct EpochOutput<T> {
    pub x: DenseVector<T>,
    /// Number of inner steps taken.
    pub steps: u64,
}

/// One sliding epoch from anchor `w0`: broadcast `∇f(w0)`, then `T ~ Geom(p)`
/// proximal steps on the master, each using one sampled client gradient.
///
/// `forced_steps` replaces the random `T`. `held` lists extra points the caller
/// keeps alive; they are reported at round boundaries together with `x_t`.
#[allow(clippy::too_many_arguments)]
pub fn svrs_epoch<T: Real>(
    np: &mut NetProblem<'_, T>,
    w0: &DenseVector<T>,
    hyper: &SvrsHyper,
    inner: &InnerSolveSpec,
    rng: &mut SeededRng,
    forced_steps: Option<u64>,
    held: &[&DenseVector<T>],
    certs: &mut CertificateLog,
) -> Result<EpochOutput<T>> {
    w0.check_dim(np.problem().dim())?;
    let steps = match forced_steps {
        Some(t) => t,
        None => rng.geometric(hyper.p)?,
    };
    let theta = T::lit(hyper.theta);
    let n = np.n();
    np.broadcast_full_gradient(w0)?;
    let mut x = w0.clone();
    for _ in 0..steps {
        mark(np, &x, held);
        let i = rng.index(n);
        let g = np.anchor_correction(i)?;
        let mut v = np.sample_component_gradient(i, &x)?;
        v -= &np.master_gradient(&x)?;
        v -= &g;
        x = solve_inner(np, &x, &v, theta, inner, certs)?;
    }
    Ok(EpochOutput { x, steps })
}

fn mark<T: Real>(np: &mut NetProblem<'_, T>, x: &DenseVector<T>, held: &[&DenseVector<T>]) {
    let mut pts = Vec::with_capacity(held.len() + 1);
    pts.push(x);
    pts.extend_from_slice(held);
    np.mark_round(&pts);
}

/// Repeated epochs `w_{k+1} = epoch(w_k)`; one record per epoch.
pub fn svrs<T: Real>(
    np: &mut NetProblem<'_, T>,
    w0: &DenseVector<T>,
    hyper: &SvrsHyper,
    inner: &InnerSolveSpec,
    opts: &RunOptions,
    rng: &mut SeededRng,
) -> Result<RunTrace> {
    let (mut trace, mut certs) = new_trace("svrs", np, rng, hyper, opts)?;
    let mut w = w0.clone();
    record(&mut trace, np, 0, &w)?;
    let mut k = 0;
    while !opts.done(&trace) {
        w = svrs_epoch(np, &w, hyper, inner, rng, None, &[], &mut certs)?.x;
        k += 1;
        record(&mut trace, np, k, &w)?;
    }
    np.mark_round(&[&w]);
    Ok(finish(trace, certs))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::netsim::CountingMode;
    use crate::numkit::DenseMatrix;
    use crate::oracle::{Problem, QuadraticComponent, SharedComponent};

    fn identity_problem(n: usize) -> Problem<f64> {
        let comps: Vec<SharedComponent<f64>> = (0..n)
            .map(|_| {
                Arc::new(QuadraticComponent::new(DenseMatrix::from_diag(&[1.0, 1.0]), DenseVector::zeros(2), 0.0).unwrap())
                    as SharedComponent<f64>
            })
            .collect();
        Problem::new(comps, 1.0, 1.0).unwrap()
    }

    #[test]
    fn single_node_forced_step_is_a_prox() {
        let p = identity_problem(1);
        let mut np = NetProblem::new(&p, CountingMode::Paper);
        let hyper = SvrsHyper::new(0.5, 1.0).unwrap();
        let inner = InnerSolveSpec::exact(&p).unwrap();
        let mut certs = CertificateLog::new();
        let mut rng = SeededRng::new(1);
        let w0 = DenseVector::basis(2, 0);
        let out = svrs_epoch(&mut np, &w0, &hyper, &inner, &mut rng, Some(1), &[], &mut certs).unwrap();
        assert!((out.x[0] - 1.0 / 1.5).abs() < 1e-15);
        assert_eq!(out.x[1], 0.0);
        // n = 1: no broadcast cost, one sampled exchange
        assert_eq!(np.ledger().vector_exchanges(), 2);
    }

    #[test]
    fn epoch_cost_is_exact_in_default_mode() {
        let p = identity_problem(6);
        let hyper = SvrsHyper::new(0.1, 1.0 / 6.0).unwrap();
        let inner = InnerSolveSpec::exact(&p).unwrap();
        let mut rng = SeededRng::new(9);
        for _ in 0..50 {
            let mut np = NetProblem::new(&p, CountingMode::Paper);
            let mut certs = CertificateLog::new();
            let out = svrs_epoch(&mut np, &DenseVector::from_f64(&[1.0, -2.0]), &hyper, &inner, &mut rng, None, &[], &mut certs)
                .unwrap();
            assert_eq!(np.ledger().vector_exchanges(), 2 * 5 + 2 * out.steps);
            assert_eq!(certs.count, out.steps);
            assert_eq!(certs.violations, 0);
        }
    }

    #[test]
    fn zero_iterations_gives_initial_record() {
        let p = identity_problem(3);
        let mut np = NetProblem::new(&p, CountingMode::Paper);
        let hyper = SvrsHyper::new(0.1, 1.0 / 3.0).unwrap();
        let inner = InnerSolveSpec::exact(&p).unwrap();
        let t = svrs(&mut np, &DenseVector::zeros(2), &hyper, &inner, &RunOptions::iters(0), &mut SeededRng::new(0))
            .unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].comm, 0);
    }
}
