use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use svrs_core::netsim::NetProblem;
use svrs_core::numkit::{DenseVector, SeededRng};
use svrs_core::oracle::Problem;
use svrs_core::solvers::{
    accsvrs, default_acc_hyper, default_svrp_theta, default_svrs_hyper, loopless_svrs, svrp, svrs, AccHyper,
    InnerMode, InnerSolveSpec, RunOptions, RunTrace, SvrsHyper, TraceRecord,
};

use crate::config::{BenchConfig, SolverConfig, SolverKind};
use crate::plot::write_plotscript;
use crate::summary::{write_summary, ComparisonRow};
use crate::{BenchError, Result};

/// Files written by [`run`] and the comparison table.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    /// `(label, seed, csv path)` in config order.
    pub traces: Vec<(String, u64, PathBuf)>,
    pub summary: Vec<ComparisonRow>,
}

fn inner_spec(problem: &Problem<f64>, s: &SolverConfig) -> svrs_core::Result<InnerSolveSpec> {
    let spec = match s.inner {
        InnerMode::ExactQuadratic => InnerSolveSpec::exact(problem)?,
        InnerMode::Agd => InnerSolveSpec::agd(problem)?,
    };
    match s.inner_accuracy {
        Some(a) => spec.with_accuracy(a),
        None => Ok(spec),
    }
}

fn svrs_hyper(problem: &Problem<f64>, s: &SolverConfig) -> svrs_core::Result<SvrsHyper> {
    let d = default_svrs_hyper(problem)?;
    SvrsHyper::new(s.theta.unwrap_or(d.theta), s.p.unwrap_or(d.p))
}

fn acc_hyper(problem: &Problem<f64>, s: &SolverConfig) -> svrs_core::Result<AccHyper> {
    let mut h = default_acc_hyper(problem)?;
    if let Some(scale) = s.tau_scale {
        h = h.with_tau_scale(scale, problem.n(), problem.delta())?;
    }
    if s.theta.is_some() || s.p.is_some() {
        h = AccHyper::new(s.theta.unwrap_or(h.theta), s.p.unwrap_or(h.p), h.tau, h.alpha)?;
    }
    Ok(h)
}

/// One solver run from the origin.
pub fn run_one(problem: &Problem<f64>, cfg: &BenchConfig, s: &SolverConfig, seed: u64) -> svrs_core::Result<RunTrace> {
    let mut opts = RunOptions::iters(cfg.max_iters.unwrap_or(u64::MAX));
    if let Some(c) = cfg.max_comm {
        opts = opts.with_max_comm(c);
    }
    if cfg.stop_at_eps {
        opts = opts.with_target_gap(cfg.eps);
    }
    let x0 = DenseVector::zeros(problem.dim());
    let mut rng = SeededRng::new(seed);
    let mut np = NetProblem::new(problem, cfg.counting);
    let mut trace = match s.name {
        SolverKind::Svrs => svrs(&mut np, &x0, &svrs_hyper(problem, s)?, &inner_spec(problem, s)?, &opts, &mut rng)?,
        SolverKind::Loopless => {
            loopless_svrs(&mut np, &x0, &svrs_hyper(problem, s)?, &inner_spec(problem, s)?, &opts, &mut rng)?
        }
        SolverKind::AccSvrs => accsvrs(&mut np, &x0, &acc_hyper(problem, s)?, &inner_spec(problem, s)?, &opts, &mut rng)?,
        SolverKind::Svrp => {
            let theta = s.theta.unwrap_or_else(|| default_svrp_theta(problem));
            let p = s.p.unwrap_or(1.0 / problem.n() as f64);
            svrp(&mut np, &x0, theta, p, &opts, &mut rng)?
        }
    };
    trace.meta.solver = s.label();
    Ok(trace)
}

/// Keeps about `max_rows` evenly strided rows, plus the first row at or
/// below `eps` and the last row (0 keeps everything).
pub fn thin_records(records: &[TraceRecord], max_rows: usize, eps: f64) -> Vec<TraceRecord> {
    if max_rows == 0 || records.len() <= max_rows {
        return records.to_vec();
    }
    let stride = records.len().div_ceil(max_rows);
    let reach = records.iter().position(|r| r.f_gap.is_some_and(|g| g <= eps));
    records
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || Some(*i) == reach || *i + 1 == records.len())
        .map(|(_, r)| *r)
        .collect()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

/// Runs every (solver, seed) pair in parallel, then writes one trace CSV and
/// metadata JSON per run, `problem.json`, `config.toml`, `summary.csv` and
/// `plot.gp` from a single thread.
pub fn run(cfg: &BenchConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    let jobs: Vec<(usize, u64)> =
        (0..cfg.solvers.len()).flat_map(|s| cfg.seeds.iter().map(move |&seed| (s, seed))).collect();
    let results: Vec<Result<RunTrace>> = jobs
        .par_iter()
        .map(|&(s, seed)| {
            let sc = &cfg.solvers[s];
            run_one(&problem, cfg, sc, seed)
                .map_err(|source| BenchError::Run { run: format!("{} seed {seed}", sc.label()), source })
        })
        .collect();

    let dir = cfg.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    write_json(&dir.join("problem.json"), problem.descriptor())?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml())?;

    let mut traces = Vec::with_capacity(jobs.len());
    let mut per_solver: Vec<Vec<Vec<TraceRecord>>> = vec![Vec::new(); cfg.solvers.len()];
    for (&(s, seed), res) in jobs.iter().zip(results) {
        let mut trace = res?;
        let label = cfg.solvers[s].label();
        trace.records = thin_records(&trace.records, cfg.max_rows, cfg.eps);
        let stem = format!("{label}_seed{seed}");
        let csv = dir.join(format!("{stem}.csv"));
        trace.write_csv(BufWriter::new(File::create(&csv)?))?;
        write_json(&dir.join(format!("{stem}.json")), &trace.meta)?;
        traces.push((label, seed, csv));
        per_solver[s].push(trace.records);
    }

    let summary: Vec<ComparisonRow> = cfg
        .solvers
        .iter()
        .zip(&per_solver)
        .map(|(s, runs)| {
            let refs: Vec<&[TraceRecord]> = runs.iter().map(Vec::as_slice).collect();
            ComparisonRow::from_traces(&s.label(), &refs, cfg.eps)
        })
        .collect();
    write_summary(&summary, BufWriter::new(File::create(dir.join("summary.csv"))?))?;
    let curves: Vec<(String, PathBuf)> = traces.iter().map(|(l, seed, p)| (format!("{l} seed {seed}"), p.clone())).collect();
    write_plotscript(&curves, &dir.join("plot.gp"))?;
    Ok(RunOutput { dir, traces, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: u64, gap: f64) -> TraceRecord {
        TraceRecord { k, comm: k, grads: k, proxes: 0, f_gap: Some(gap), dist_sq: None }
    }

    #[test]
    fn thinning_keeps_first_hit_and_last_row() {
        let recs: Vec<TraceRecord> = (0..1000).map(|k| rec(k, 1.0 / (1.0 + k as f64))).collect();
        let thin = thin_records(&recs, 10, 1.0 / 334.0);
        assert!(thin.len() <= 13);
        assert!(thin.iter().any(|r| r.k == 333));
        assert_eq!(thin.last().unwrap().k, 999);
        assert_eq!(thin[0].k, 0);
        assert_eq!(thin_records(&recs, 0, 0.1).len(), 1000);
    }
}
