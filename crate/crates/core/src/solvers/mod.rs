//! Sliding methods (epoch, loopless and accelerated), the proximal-point
//! baseline, inner subproblem solvers and hyperparameter defaults.

mod accsvrs;
mod hyper;
mod inner;
mod loopless;
mod svrp;
mod svrs;
mod trace;

pub use accsvrs::{accsvrs, coupling_gradient};
pub use hyper::{
    acc_hyper_for, default_acc_hyper, default_svrp_theta, default_svrs_hyper, iteration_bound,
    predicted_iterations, svrs_hyper_for, AccHyper, Method, SvrsHyper,
};
pub use inner::{solve_inner, Certificate, CertificateLog, InnerMode, InnerSolveSpec};
pub use loopless::loopless_svrs;
pub use svrp::svrp;
pub use svrs::{svrs, svrs_epoch, EpochOutput};
pub use trace::{RunMeta, RunTrace, TraceRecord};

use serde::{Deserialize, Serialize};

use crate::netsim::NetProblem;
use crate::numkit::{DenseVector, SeededRng};
use crate::{Error, Real, Result};

/// When a run stops: after `max_iters` outer iterations, once the ledger
/// reaches `max_comm`, or once the recorded gap is at most `target_gap`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub max_iters: u64,
    pub max_comm: Option<u64>,
    pub target_gap: Option<f64>,
    /// Keep every inner certificate in the trace metadata (memory heavy).
    pub keep_certificates: bool,
}

impl RunOptions {
    pub fn iters(k: u64) -> Self {
        Self { max_iters: k, max_comm: None, target_gap: None, keep_certificates: false }
    }

    pub fn with_max_comm(mut self, c: u64) -> Self {
        self.max_comm = Some(c);
        self
    }

    pub fn with_target_gap(mut self, eps: f64) -> Self {
        self.target_gap = Some(eps);
        self
    }

    pub fn keeping_certificates(mut self) -> Self {
        self.keep_certificates = true;
        self
    }

    fn done(&self, trace: &RunTrace) -> bool {
        let last = match trace.last() {
            Some(r) => r,
            None => return false,
        };
        if last.k >= self.max_iters {
            return true;
        }
        if self.max_comm.is_some_and(|c| last.comm >= c) {
            return true;
        }
        if let (Some(eps), Some(g)) = (self.target_gap, last.f_gap) {
            if g <= eps {
                return true;
            }
        }
        false
    }
}

fn new_trace<T: Real, H: Serialize>(
    solver: &str,
    np: &NetProblem<'_, T>,
    rng: &SeededRng,
    hyper: &H,
    opts: &RunOptions,
) -> Result<(RunTrace, CertificateLog)> {
    let meta = RunMeta {
        solver: solver.to_string(),
        seed: rng.seed(),
        rng: rng.algorithm().to_string(),
        counting: np.mode(),
        hyper: serde_json::to_value(hyper)?,
        problem: np.problem().descriptor().clone(),
        certificates: CertificateLog::new(),
    };
    let certs = if opts.keep_certificates { CertificateLog::keeping_entries() } else { CertificateLog::new() };
    Ok((RunTrace::new(meta), certs))
}

fn record<T: Real>(trace: &mut RunTrace, np: &NetProblem<'_, T>, k: u64, x: &DenseVector<T>) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite("iterate"));
    }
    let p = np.problem();
    trace.push(k, np.ledger(), p.f_gap(x).map(Real::as_f64), p.dist_sq_to_opt(x).map(Real::as_f64));
    Ok(())
}

fn finish(mut trace: RunTrace, certs: CertificateLog) -> RunTrace {
    trace.meta.certificates = certs;
    trace
}
