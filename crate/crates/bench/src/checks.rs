//! The invariant suite behind `svrs verify`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use svrs_core::hardlab::{verify as hardlab_verify, VerifyConfig, VerifyReport};
use svrs_core::netsim::{expected_epoch_cost, CountingMode, NetProblem};
use svrs_core::numkit::{bregman, chi_square_geometric, ks_distance_geometric, DenseVector, SeededRng};
use svrs_core::oracle::Problem;
use svrs_core::problems::{gen_synthetic, DeltaSource, SyntheticSpec};
use svrs_core::solvers::{
    accsvrs, default_acc_hyper, default_svrs_hyper, loopless_svrs, svrs, svrs_epoch, CertificateLog, InnerSolveSpec,
    RunOptions,
};

use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub hardlab: VerifyConfig,
    pub sandwich_pairs: usize,
    pub sampler_draws: usize,
    pub ledger_n: usize,
    pub ledger_epochs: usize,
    pub anchor_iters: u64,
    pub certificate_iters: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            hardlab: VerifyConfig::default(),
            sandwich_pairs: 10_000,
            sampler_draws: 1_000_000,
            ledger_n: 20,
            ledger_epochs: 10_000,
            anchor_iters: 100_000,
            certificate_iters: 200,
            seed: 0,
        }
    }
}

impl SuiteConfig {
    /// Reduced sizes for smoke runs.
    pub fn quick() -> Self {
        Self {
            hardlab: VerifyConfig { pairs: 1000, prox_trials: 20, runs: 10, ..VerifyConfig::default() },
            sandwich_pairs: 1000,
            sampler_draws: 100_000,
            ledger_epochs: 2000,
            anchor_iters: 20_000,
            certificate_iters: 50,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub passed: bool,
    pub pairs: usize,
    pub violations: usize,
    /// Extremes of `D_h(x,y) θ / ||x-y||²` (bounds 3/8 and 5/8).
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerCheck {
    pub passed: bool,
    pub draws: usize,
    /// `(p, KS distance)` per probability.
    pub ks: Vec<(f64, f64)>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerCheck {
    pub passed: bool,
    pub n: usize,
    pub epochs: usize,
    pub mean_cost: f64,
    pub expected_cost: f64,
    pub rel_error: f64,
    /// Epochs whose cost differed from `2(n-1) + 2T`.
    pub mismatched_epochs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorGapCheck {
    pub passed: bool,
    pub gaps: usize,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub passed: bool,
    pub solves: u64,
    pub violations: u64,
    pub floored: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    #[serde(flatten)]
    pub hardlab: VerifyReport,
    pub bregman_sandwich: SandwichCheck,
    pub sampler: SamplerCheck,
    pub ledger: LedgerCheck,
    pub anchor_gaps: AnchorGapCheck,
    pub certificates: CertificateCheck,
    pub all_passed: bool,
}

fn small_problem(d: usize, n: usize, mu: f64, seed: u64) -> svrs_core::Result<Problem<f64>> {
    gen_synthetic(&SyntheticSpec {
        d,
        n,
        base_norm: 2.0,
        perturb_norm: 0.2,
        mu,
        seed,
        delta_source: DeltaSource::Exact,
    })
}

/// `(3/8θ)||x-y||² ≤ D_h(x,y) ≤ (5/8θ)||x-y||²` for
/// `h = f_1 + ||·||²/(2θ) - f`, `θ = 1/(4√n δ)` with the exact modulus.
pub fn check_sandwich(pairs: usize, seed: u64) -> Result<SandwichCheck> {
    let p = small_problem(8, 10, 0.1, seed)?;
    let theta = default_svrs_hyper(&p)?.theta;
    let master = p.master();
    let h = |x: &DenseVector<f64>| {
        p.component(master).value(x) + x.norm_sq() / (2.0 * theta) - p.full_value(x).expect("dimension checked")
    };
    let gh = |x: &DenseVector<f64>| {
        let mut g = p.component(master).gradient(x);
        g.axpy(1.0 / theta, x);
        g -= &p.full_gradient(x).expect("dimension checked");
        g
    };
    let mut rng = SeededRng::derived(seed, 11);
    let (mut lo, mut hi, mut bad) = (f64::INFINITY, 0f64, 0);
    for _ in 0..pairs {
        let x: DenseVector<f64> = rng.ball(p.dim(), 10.0);
        let y: DenseVector<f64> = rng.ball(p.dim(), 10.0);
        let r = x.dist_sq(&y);
        let d = bregman(h, gh, &x, &y)?;
        let ratio = d * theta / r;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if !(3.0 / (8.0 * theta) * r <= d && d <= 5.0 / (8.0 * theta) * r) {
            bad += 1;
        }
    }
    Ok(SandwichCheck { passed: bad == 0, pairs, violations: bad, min_ratio: lo, max_ratio: hi })
}

pub fn check_sampler(draws: usize, seed: u64) -> Result<SamplerCheck> {
    let tolerance = 0.005;
    let mut rng = SeededRng::derived(seed, 12);
    let mut ks = Vec::new();
    for p in [0.5, 1.0 / 20.0, 1.0 / 400.0] {
        let samples = (0..draws).map(|_| rng.geometric(p)).collect::<svrs_core::Result<Vec<u64>>>()?;
        ks.push((p, ks_distance_geometric(&samples, p)));
    }
    Ok(SamplerCheck { passed: ks.iter().all(|&(_, d)| d <= tolerance), draws, ks, tolerance })
}

/// Per-epoch ledger deltas of the sliding epoch with `p = 1/n` in paper counting.
pub fn check_ledger(n: usize, epochs: usize, seed: u64) -> Result<LedgerCheck> {
    let p = small_problem(4, n, 0.5, seed)?;
    let hyper = default_svrs_hyper(&p)?;
    let inner = InnerSolveSpec::exact(&p)?;
    let mut np = NetProblem::new(&p, CountingMode::Paper);
    let mut rng = SeededRng::derived(seed, 13);
    let mut certs = CertificateLog::new();
    let mut w = DenseVector::zeros(p.dim());
    let mut total = 0u64;
    let mut mismatched = 0;
    for _ in 0..epochs {
        let before = np.ledger().vector_exchanges();
        let out = svrs_epoch(&mut np, &w, &hyper, &inner, &mut rng, None, &[], &mut certs)?;
        let cost = np.ledger().vector_exchanges() - before;
        if cost != 2 * (n as u64 - 1) + 2 * out.steps {
            mismatched += 1;
        }
        total += cost;
        w = out.x;
    }
    let mean = total as f64 / epochs as f64;
    let expected = expected_epoch_cost(n, hyper.p);
    let rel = (mean - expected).abs() / expected;
    Ok(LedgerCheck {
        passed: rel <= 0.05 && mismatched == 0,
        n,
        epochs,
        mean_cost: mean,
        expected_cost: expected,
        rel_error: rel,
        mismatched_epochs: mismatched,
    })
}

/// Gaps between anchor refreshes of the loopless method against `Geom(p)`.
pub fn check_anchor_gaps(iters: u64, seed: u64) -> Result<AnchorGapCheck> {
    let p = small_problem(2, 10, 0.5, seed)?;
    let hyper = default_svrs_hyper(&p)?;
    let inner = InnerSolveSpec::exact(&p)?;
    let mut np = NetProblem::new(&p, CountingMode::Paper).with_event_log();
    let mut rng = SeededRng::derived(seed, 14);
    loopless_svrs(&mut np, &DenseVector::zeros(p.dim()), &hyper, &inner, &RunOptions::iters(iters), &mut rng)?;
    let gaps = np.ledger().anchor_gaps().unwrap_or_default();
    let (stat, dof) = chi_square_geometric(&gaps, hyper.p, 5.0);
    let p_value = if dof == 0 { 0.0 } else { 1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(stat) };
    Ok(AnchorGapCheck { passed: p_value > 0.01, gaps: gaps.len(), chi_square: stat, dof, p_value })
}

/// Every inner solve of short runs with both inner modes satisfies its bound.
pub fn check_certificates(iters: u64, seed: u64) -> Result<CertificateCheck> {
    let p = small_problem(10, 8, 0.05, seed)?;
    let x0 = DenseVector::zeros(p.dim());
    let mut log = CertificateLog::new();
    for inner in [InnerSolveSpec::exact(&p)?, InnerSolveSpec::agd(&p)?] {
        let opts = RunOptions::iters(iters);
        let sh = default_svrs_hyper(&p)?;
        let ah = default_acc_hyper(&p)?;
        let traces = [
            svrs(&mut NetProblem::new(&p, CountingMode::Paper), &x0, &sh, &inner, &opts, &mut SeededRng::derived(seed, 15))?,
            accsvrs(&mut NetProblem::new(&p, CountingMode::Paper), &x0, &ah, &inner, &opts, &mut SeededRng::derived(seed, 16))?,
            loopless_svrs(
                &mut NetProblem::new(&p, CountingMode::Paper),
                &x0,
                &sh,
                &inner,
                &RunOptions::iters(iters * 10),
                &mut SeededRng::derived(seed, 17),
            )?,
        ];
        for t in &traces {
            log.merge(&t.meta.certificates);
        }
    }
    Ok(CertificateCheck { passed: log.violations == 0, solves: log.count, violations: log.violations, floored: log.floored })
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let hardlab = hardlab_verify(&cfg.hardlab)?;
    let bregman_sandwich = check_sandwich(cfg.sandwich_pairs, cfg.seed)?;
    let sampler = check_sampler(cfg.sampler_draws, cfg.seed)?;
    let ledger = check_ledger(cfg.ledger_n, cfg.ledger_epochs, cfg.seed)?;
    let anchor_gaps = check_anchor_gaps(cfg.anchor_iters, cfg.seed)?;
    let certificates = check_certificates(cfg.certificate_iters, cfg.seed)?;
    let all_passed = hardlab.passed
        && bregman_sandwich.passed
        && sampler.passed
        && ledger.passed
        && anchor_gaps.passed
        && certificates.passed;
    Ok(SuiteReport { hardlab, bregman_sandwich, sampler, ledger, anchor_gaps, certificates, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let r = run_suite(&SuiteConfig::quick()).unwrap();
        assert!(r.all_passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        let v = serde_json::to_value(&r).unwrap();
        for key in ["avess_check", "prox_check", "minimizer_check", "info_dim_violations", "floor_violations", "ledger"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn ledger_epochs_cost_exactly() {
        let r = check_ledger(6, 300, 1).unwrap();
        assert_eq!(r.mismatched_epochs, 0);
        assert_eq!(r.expected_cost, 22.0);
    }
}
