use serde::{Deserialize, Serialize};

use super::{track_info_dim, HardInstance, InfoDimTrace, PartitionTable, ViolationKind};
use crate::netsim::{CountingMode, NetProblem};
use crate::numkit::{DenseVector, SeededRng};
use crate::oracle::{exact_avess_quadratic, ComponentOracle, QuadraticComponent};
use crate::solvers::{accsvrs, default_acc_hyper, default_svrs_hyper, loopless_svrs, InnerSolveSpec, Method, RunOptions};
use crate::{Error, Result};

/// Knobs of [`verify`]. Defaults follow the standard check sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub n: usize,
    /// Rows of the instance used for the similarity and prox checks.
    pub m_small: usize,
    /// Rows of the scaled instance used for tracked runs.
    pub m_runs: usize,
    pub zetas: Vec<f64>,
    pub pairs: usize,
    pub prox_trials: usize,
    /// Tracked runs per solver.
    pub runs: usize,
    pub loopless_iters: u64,
    pub acc_iters: u64,
    pub delta: f64,
    pub mu: f64,
    pub gap0: f64,
    pub seed: u64,
    /// Row assignment for the tracked-run instance (negative controls only).
    #[serde(skip)]
    pub partition: Option<PartitionTable>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n: 5,
            m_small: 9,
            m_runs: 31,
            zetas: vec![0.5, 1.0, std::f64::consts::SQRT_2],
            pairs: 10_000,
            prox_trials: 100,
            runs: 100,
            loopless_iters: 300,
            acc_iters: 12,
            delta: 1.0,
            mu: 1e-3,
            gap0: 1.0,
            seed: 0,
            partition: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvessCheck {
    pub passed: bool,
    /// Largest exact quadratic modulus over the `ζ` values.
    pub exact_modulus: f64,
    pub modulus_bound: f64,
    /// Largest sampled mean squared ratio.
    pub max_pair_ratio: f64,
    pub ratio_bound: f64,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCheck {
    pub passed: bool,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerCheck {
    pub passed: bool,
    pub max_rel_error: f64,
    pub max_gap_rel_error: f64,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub avess_check: AvessCheck,
    pub prox_check: ErrorCheck,
    pub minimizer_check: MinimizerCheck,
    /// Transition-rule, span, growth, initialization and stopping-time violations.
    pub info_dim_violations: usize,
    pub floor_violations: usize,
    pub runs: usize,
    pub passed: bool,
}

pub fn check_avess(n: usize, m: usize, zetas: &[f64], pairs: usize, rng: &mut SeededRng) -> Result<AvessCheck> {
    let bound = 8.0 * n as f64 + 4.0;
    let mut exact = 0.0f64;
    let mut worst = 0.0f64;
    for &zeta in zetas {
        let inst = HardInstance::unscaled(n, m, zeta, 1.0)?;
        let comps = inst.components::<f64>();
        let hs: Vec<_> = comps.iter().map(|c| c.hessian().expect("quadratic component")).collect();
        exact = exact.max(exact_avess_quadratic(&hs)?);
        let problem = inst.problem()?;
        for _ in 0..pairs {
            let x: DenseVector<f64> = rng.normal_vector(m);
            let y: DenseVector<f64> = rng.normal_vector(m);
            if let Some(r) = problem.avess_ratio(&x, &y) {
                worst = worst.max(r);
            }
        }
    }
    Ok(AvessCheck {
        passed: exact <= bound.sqrt() + 1e-9 && worst <= bound,
        exact_modulus: exact,
        modulus_bound: bound.sqrt(),
        max_pair_ratio: worst,
        ratio_bound: bound,
        pairs: pairs * zetas.len(),
    })
}

/// Closed-form component proxes against a Cholesky solve of `(H + I/γ) u = x/γ - ∇f(0)`.
pub fn check_prox(n: usize, m: usize, trials: usize, rng: &mut SeededRng) -> Result<ErrorCheck> {
    let tol = 1e-9;
    let inst = HardInstance::unscaled(n, m, 1.0, 1.0)?;
    let comps = inst.components::<f64>();
    let dense: Vec<QuadraticComponent<f64>> = comps
        .iter()
        .map(|c| {
            let lin = c.gradient(&DenseVector::zeros(m)).scaled(-1.0);
            QuadraticComponent::new(c.hessian().expect("quadratic component"), lin, 0.0)
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let i = t % n;
        let x: DenseVector<f64> = rng.normal_vector(m);
        let gamma = 10f64.powf(rng.uniform() * 4.0 - 2.0);
        let u = comps[i].prox(&x, gamma)?;
        let v = dense[i].prox(&x, gamma)?;
        worst = worst.max(u.dist_sq(&v).sqrt() / (1.0 + v.norm()));
    }
    Ok(ErrorCheck { passed: worst <= tol, max_rel_error: worst, tolerance: tol, trials })
}

/// Closed-form minimizer and initial gap over a grid of scaled instances.
pub fn check_minimizers() -> Result<MinimizerCheck> {
    let mut worst = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut count = 0;
    for n in [3, 5, 10] {
        for ratio in [1.0, 10.0, 100.0, 1e4] {
            for gap0 in [0.1, 1.0, 30.0] {
                for m in [8, 31, 64] {
                    let mu = 0.1;
                    let inst = HardInstance::scaled(n, ratio * mu, mu, gap0, m)?;
                    let closed = inst.minimizer_closed_form().expect("scaled instance");
                    let numeric = inst.minimizer_numeric()?;
                    worst = worst.max(closed.dist_sq(&numeric).sqrt() / numeric.norm());
                    let drop = inst.value(&DenseVector::zeros(m)) - inst.value(&closed);
                    worst_gap = worst_gap.max((drop - gap0).abs() / gap0);
                    count += 1;
                }
            }
        }
    }
    Ok(MinimizerCheck {
        passed: worst <= 1e-10 && worst_gap <= 1e-9,
        max_rel_error: worst,
        max_gap_rel_error: worst_gap,
        instances: count,
    })
}

/// One recorded run from the origin on `inst`, replayed through the tracker.
pub fn tracked_run(inst: &HardInstance, method: Method, iters: u64, seed: u64) -> Result<InfoDimTrace> {
    let problem = inst.problem()?;
    let inner = InnerSolveSpec::exact(&problem)?;
    let mut np = NetProblem::new(&problem, CountingMode::Paper).with_recorder();
    let mut rng = SeededRng::new(seed);
    let x0 = DenseVector::zeros(inst.m());
    let opts = RunOptions::iters(iters);
    let trace = match method {
        Method::Loopless => loopless_svrs(&mut np, &x0, &default_svrs_hyper(&problem)?, &inner, &opts, &mut rng)?,
        Method::AccSvrs => accsvrs(&mut np, &x0, &default_acc_hyper(&problem)?, &inner, &opts, &mut rng)?,
        Method::Svrs => crate::solvers::svrs(&mut np, &x0, &default_svrs_hyper(&problem)?, &inner, &opts, &mut rng)?,
    };
    if trace.meta.certificates.violations > 0 {
        return Err(Error::InvalidParameter("inner certificate violated".into()));
    }
    let events = np.take_recorded().unwrap_or_default();
    Ok(track_info_dim(&events, inst.partition(), Some(inst)))
}

pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut rng = SeededRng::derived(cfg.seed, 0);
    let avess_check = check_avess(cfg.n, cfg.m_small, &cfg.zetas, cfg.pairs, &mut rng)?;
    let prox_check = check_prox(cfg.n, cfg.m_small, cfg.prox_trials, &mut rng)?;
    let minimizer_check = check_minimizers()?;
    let mut inst = HardInstance::scaled(cfg.n, cfg.delta, cfg.mu, cfg.gap0, cfg.m_runs)?;
    if let Some(p) = &cfg.partition {
        inst = inst.with_partition(p.clone())?;
    }
    let mut info = 0;
    let mut floor = 0;
    for r in 0..cfg.runs {
        let seed = SeededRng::derived(cfg.seed, 1 + r as u64).next_u64();
        for (method, iters) in [(Method::Loopless, cfg.loopless_iters), (Method::AccSvrs, cfg.acc_iters)] {
            let t = tracked_run(&inst, method, iters, seed)?;
            let f = t.count(ViolationKind::Floor);
            floor += f;
            info += t.violations.len() - f;
        }
    }
    let passed = avess_check.passed && prox_check.passed && minimizer_check.passed && info == 0 && floor == 0;
    Ok(VerifyReport {
        avess_check,
        prox_check,
        minimizer_check,
        info_dim_violations: info,
        floor_violations: floor,
        runs: 2 * cfg.runs,
        passed,
    })
}
