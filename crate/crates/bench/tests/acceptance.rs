//! Acceptance suite. Each test prints one `ACn PASS|FAIL` line straight to
//! stdout (bypassing capture) before asserting.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use svrs_bench::checks::{check_anchor_gaps, check_ledger, check_sampler, check_sandwich};
use svrs_bench::config::{BenchConfig, ProblemConfig, SolverConfig, SolverKind};
use svrs_bench::sweep::run_one;
use svrs_core::hardlab::{check_avess, check_minimizers, tracked_run, HardInstance, ViolationKind};
use svrs_core::netsim::{CountingMode, NetProblem};
use svrs_core::numkit::{DenseVector, SeededRng};
use svrs_core::oracle::{ComponentOracle, Problem};
use svrs_core::problems::{gen_synthetic, load_libsvm, DeltaSource, SyntheticSpec};
use svrs_core::solvers::{
    accsvrs, default_acc_hyper, default_svrp_theta, default_svrs_hyper, iteration_bound, loopless_svrs, svrp, svrs, CertificateLog,
    InnerSolveSpec, Method, RunOptions,
};

fn report(id: u32, ok: bool, detail: String) {
    let line = format!("AC{id} {}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "AC{id} failed: {detail}");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn ac01_hard_minimizer_closed_form() {
    let t = Instant::now();
    let c = check_minimizers().unwrap();
    let el = t.elapsed();
    let ok = c.max_rel_error <= 1e-10 && c.max_gap_rel_error <= 1e-9 && el < Duration::from_secs(1);
    report(
        1,
        ok,
        format!(
            "{} instances, x* rel err {:.2e} (≤ 1e-10), gap rel err {:.2e} (≤ 1e-9), {:.3}s (< 1s)",
            c.instances,
            c.max_rel_error,
            c.max_gap_rel_error,
            secs(el)
        ),
    );
}

#[test]
fn ac02_similarity_bound() {
    let t = Instant::now();
    let mut rng = SeededRng::new(2);
    let c = check_avess(5, 9, &[0.5, 1.0, std::f64::consts::SQRT_2], 10_000, &mut rng).unwrap();
    let el = t.elapsed();
    let ok = c.exact_modulus <= 44f64.sqrt() + 1e-9 && c.max_pair_ratio <= 44.0 && el < Duration::from_secs(5);
    report(
        2,
        ok,
        format!(
            "exact modulus {:.4} (≤ {:.4}), max pair ratio {:.3} over {} pairs (≤ 44), {:.2}s (< 5s)",
            c.exact_modulus,
            44f64.sqrt(),
            c.max_pair_ratio,
            c.pairs,
            secs(el)
        ),
    );
}

#[test]
fn ac03_information_expansion() {
    let t = Instant::now();
    let inst = HardInstance::scaled(5, 1.0, 1e-3, 1.0, 31).unwrap();
    let (mut rule, mut other, mut floor, mut runs) = (0, 0, 0, 0);
    for seed in 0..1000 {
        for (method, iters) in [(Method::Loopless, 300), (Method::AccSvrs, 12)] {
            let tr = tracked_run(&inst, method, iters, seed).unwrap();
            rule += tr.count(ViolationKind::EventRule) + tr.count(ViolationKind::RoundGrowth) + tr.count(ViolationKind::Init);
            floor += tr.count(ViolationKind::Floor);
            other += tr.count(ViolationKind::Span) + tr.count(ViolationKind::StoppingTime);
            runs += 1;
        }
    }
    let el = t.elapsed();
    let ok = rule == 0 && floor == 0 && other == 0 && el < Duration::from_secs(60);
    report(
        3,
        ok,
        format!(
            "{runs} runs: {rule} transition-rule, {other} span/stopping-time, {floor} floor violations, {:.1}s (< 60s)",
            secs(el)
        ),
    );
}

#[test]
fn ac04_communication_accounting() {
    let t = Instant::now();
    let c = check_ledger(20, 10_000, 4).unwrap();
    let el = t.elapsed();
    let ok = c.rel_error <= 0.05 && c.mismatched_epochs == 0 && el < Duration::from_secs(30);
    report(
        4,
        ok,
        format!(
            "mean epoch cost {:.2} vs {} (rel {:.4} ≤ 0.05), {} epochs off 2(n-1)+2T, {:.1}s (< 30s)",
            c.mean_cost,
            c.expected_cost,
            c.rel_error,
            c.mismatched_epochs,
            secs(el)
        ),
    );
}

/// Conjugate gradients on `u ↦ ∇f(u) - ∇f(0) + u/γ` (the Hessian action of a
/// quadratic plus the prox term), using only the gradient oracle.
fn numerical_prox(c: &dyn ComponentOracle<f64>, x: &DenseVector<f64>, gamma: f64) -> DenseVector<f64> {
    let zero = DenseVector::zeros(x.dim());
    let g0 = c.gradient(&zero);
    let apply = |v: &DenseVector<f64>| {
        let mut out = &c.gradient(v) - &g0;
        out.axpy(1.0 / gamma, v);
        out
    };
    // (H + I/γ) u = x/γ - ∇f(0)
    let b = DenseVector::lincomb(1.0 / gamma, x, -1.0, &g0);
    let mut u = zero;
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.norm_sq();
    let stop = (1e-15 * b.norm()).powi(2);
    for _ in 0..10 * x.dim() {
        if rr <= stop {
            break;
        }
        let ap = apply(&p);
        let a = rr / p.dot(&ap);
        u.axpy(a, &p);
        r.axpy(-a, &ap);
        let rr_new = r.norm_sq();
        p = DenseVector::lincomb(1.0, &r, rr_new / rr, &p);
        rr = rr_new;
    }
    u
}

#[test]
fn ac05_prox_correctness() {
    let t = Instant::now();
    let mut rng = SeededRng::new(5);
    let ridge = gen_synthetic::<f64>(&SyntheticSpec {
        d: 20,
        n: 10,
        base_norm: 5.0,
        perturb_norm: 1.0,
        mu: 0.1,
        seed: 5,
        delta_source: DeltaSource::Exact,
    })
    .unwrap();
    let hard = HardInstance::unscaled(5, 31, 1.0, 1.0).unwrap().problem().unwrap();
    let scaled = HardInstance::scaled(5, 10.0, 1e-2, 1.0, 31).unwrap().problem().unwrap();
    let mut worst = [0.0f64; 3];
    for (slot, p) in [&ridge, &hard, &scaled].into_iter().enumerate() {
        for trial in 0..100 {
            let c = p.component(trial % p.n());
            let x: DenseVector<f64> = rng.normal_vector(p.dim()).scaled(3.0);
            let gamma = 10f64.powf(rng.uniform() * 4.0 - 2.0);
            let u = c.prox(&x, gamma).unwrap();
            let v = numerical_prox(c, &x, gamma);
            worst[slot] = worst[slot].max(u.dist_sq(&v).sqrt() / v.norm().max(1.0));
        }
    }
    let el = t.elapsed();
    let ok = worst.iter().all(|&w| w <= 1e-8) && el < Duration::from_secs(10);
    report(
        5,
        ok,
        format!(
            "max rel err ridge {:.2e}, hard {:.2e}, scaled hard {:.2e} (≤ 1e-8, 100 inputs each), {:.2}s (< 10s)",
            worst[0],
            worst[1],
            worst[2],
            secs(el)
        ),
    );
}

fn certificate_runs(p: &Problem<f64>, log: &mut CertificateLog, seed: u64) {
    let x0 = DenseVector::zeros(p.dim());
    let sh = default_svrs_hyper(p).unwrap();
    let ah = default_acc_hyper(p).unwrap();
    let mut inners = vec![InnerSolveSpec::agd(p).unwrap(), InnerSolveSpec::agd(p).unwrap().with_accuracy(1e-6).unwrap()];
    if let Ok(e) = InnerSolveSpec::exact(p) {
        inners.push(e);
    }
    for inner in inners {
        for mode in [CountingMode::Paper, CountingMode::Exact] {
            let runs = [
                svrs(&mut NetProblem::new(p, mode), &x0, &sh, &inner, &RunOptions::iters(40), &mut SeededRng::new(seed)),
                accsvrs(&mut NetProblem::new(p, mode), &x0, &ah, &inner, &RunOptions::iters(40), &mut SeededRng::new(seed)),
                loopless_svrs(&mut NetProblem::new(p, mode), &x0, &sh, &inner, &RunOptions::iters(400), &mut SeededRng::new(seed)),
            ];
            for r in runs {
                log.merge(&r.unwrap().meta.certificates);
            }
        }
    }
}

#[test]
fn ac06_inexactness_certificates() {
    let mut log = CertificateLog::new();
    for (mu, seed) in [(1e-2, 0), (1.0, 1), (1e-4, 2)] {
        let p = gen_synthetic::<f64>(&SyntheticSpec {
            d: 30,
            n: 40,
            base_norm: 10.0,
            perturb_norm: 0.1,
            mu,
            seed,
            delta_source: DeltaSource::Exact,
        })
        .unwrap();
        certificate_runs(&p, &mut log, seed);
    }
    let formula_delta = gen_synthetic::<f64>(&SyntheticSpec { d: 12, n: 10, mu: 0.05, seed: 3, ..Default::default() }).unwrap();
    certificate_runs(&formula_delta, &mut log, 3);
    let hard = HardInstance::scaled(5, 1.0, 1e-3, 1.0, 31).unwrap().problem().unwrap();
    certificate_runs(&hard, &mut log, 4);
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/a9a_sample.libsvm");
    let libsvm = load_libsvm::<f64>(&fixture, 6, 20, 1e-2).unwrap();
    certificate_runs(&libsvm, &mut log, 5);
    let ok = log.violations == 0 && log.count > 0;
    report(
        6,
        ok,
        format!(
            "{} inner solves, {} with lhs > rhs, {} at the round-off floor, max lhs/rhs {:.3}",
            log.count, log.violations, log.floored, log.max_ratio
        ),
    );
}

#[test]
fn ac07_bregman_sandwich() {
    let c = check_sandwich(10_000, 7).unwrap();
    report(
        7,
        c.violations == 0,
        format!(
            "{} pairs, {} violations, D_h·θ/|x-y|² in [{:.4}, {:.4}] ⊂ [0.375, 0.625]",
            c.pairs, c.violations, c.min_ratio, c.max_ratio
        ),
    );
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    svrs_bench::summary::quantile(&v, 0.5)
}

#[test]
fn ac08_convergence_ordering() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let sweep = |mu: f64, sub: &str| {
        let cfg = BenchConfig {
            problem: ProblemConfig::desk(mu),
            seeds: (0..50).collect(),
            output_dir: dir.path().join(sub),
            ..BenchConfig::default()
        };
        let out = svrs_bench::run(&cfg).unwrap();
        let get = |s: &str| out.summary.iter().find(|r| r.solver == s).unwrap().median_comm;
        (get("accsvrs"), get("svrs"), get("svrp"))
    };
    let (a1, s1, p1) = sweep(1e-2, "ill");
    let (a2, s2, p2) = sweep(1.0, "well");
    let ok_a = a1 < s1 && s1 < p1;
    let ok_b = p2 <= 1.2 * a2.min(s2).min(p2);

    // SVRS for K_1(1e-4) epochs without early stopping
    let eps = 1e-4;
    let cfg = BenchConfig {
        problem: ProblemConfig::desk(1e-2),
        stop_at_eps: false,
        max_comm: None,
        max_rows: 0,
        ..BenchConfig::default()
    };
    let p = cfg.problem.build().unwrap();
    let gap0 = p.f_gap(&DenseVector::zeros(p.dim())).unwrap();
    let k1 = iteration_bound(Method::Svrs, p.n(), p.delta(), p.mu(), gap0, eps).ceil() as u64;
    let cfg = BenchConfig { max_iters: Some(k1), ..cfg };
    let finals: Vec<f64> = (0..50)
        .map(|seed| {
            let tr = run_one(&p, &cfg, &SolverConfig::new(SolverKind::Svrs), seed).unwrap();
            tr.last().unwrap().f_gap.unwrap()
        })
        .collect();
    let med = median(finals);
    let ok_c = med <= eps;
    let el = t.elapsed();
    let ok = ok_a && ok_b && ok_c && el < Duration::from_secs(300);
    report(
        8,
        ok,
        format!(
            "(a) mu=1e-2 median comm acc {a1} < svrs {s1} < svrp {p1}: {ok_a}; (b) mu=1 svrp {p2} vs best {}: {ok_b}; \
             (c) median gap after K_1={k1} epochs {med:.2e} ≤ 1e-4: {ok_c}; {:.1}s (< 300s)",
            a2.min(s2).min(p2),
            secs(el)
        ),
    );
}

#[test]
fn ac09_geometric_machinery() {
    let s = check_sampler(1_000_000, 9).unwrap();
    let g = check_anchor_gaps(100_000, 9).unwrap();
    let ks: Vec<String> = s.ks.iter().map(|(p, d)| format!("p={p}: {d:.4}")).collect();
    report(
        9,
        s.passed && g.passed,
        format!(
            "KS distances [{}] (≤ 0.005); loopless anchor gaps chi² {:.1} on {} dof, p-value {:.3} (> 0.01) over {} gaps",
            ks.join(", "),
            g.chi_square,
            g.dof,
            g.p_value,
            g.gaps
        ),
    );
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn ac10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BenchConfig {
        problem: ProblemConfig::desk(1e-2),
        solvers: [SolverKind::AccSvrs, SolverKind::Svrs, SolverKind::Loopless, SolverKind::Svrp]
            .map(SolverConfig::new)
            .to_vec(),
        seeds: vec![0, 1, 2, 3, 4, 5],
        eps: 1e-4,
        output_dir: dir.path().join("a"),
        ..BenchConfig::default()
    };
    let first = read_outputs(&svrs_bench::run(&cfg).unwrap().dir);
    let second = read_outputs(&svrs_bench::run(&BenchConfig { output_dir: dir.path().join("b"), ..cfg.clone() }).unwrap().dir);
    let again = read_outputs(&svrs_bench::run(&cfg).unwrap().dir);
    let csvs = first.iter().filter(|(n, _)| n.ends_with(".csv")).count();
    let ok = first == second && first == again && csvs == 25;
    report(10, ok, format!("{} files ({csvs} CSVs incl. summary) byte-identical across 3 runs", first.len()));
}

#[test]
fn svrp_reaches_the_optimum_in_both_counting_modes() {
    // not a numbered criterion: guards the baseline used in AC8
    let p = gen_synthetic::<f64>(&SyntheticSpec { d: 8, n: 6, base_norm: 2.0, perturb_norm: 0.1, mu: 1.0, seed: 1, ..Default::default() })
        .unwrap();
    for mode in [CountingMode::Paper, CountingMode::Exact] {
        let mut np = NetProblem::new(&p, mode);
        let t = svrp(&mut np, &DenseVector::zeros(8), default_svrp_theta(&p), 1.0 / 6.0, &RunOptions::iters(3000), &mut SeededRng::new(1)).unwrap();
        assert!(t.last().unwrap().f_gap.unwrap() < 1e-10);
    }
}
