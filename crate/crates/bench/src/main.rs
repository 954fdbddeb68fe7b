use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use svrs_bench::checks::{run_suite, SuiteConfig};
use svrs_bench::config::{BenchConfig, ProblemConfig, SolverConfig, SolverKind};
use svrs_bench::plot::{find_traces, write_plotscript};
use svrs_core::hardlab::{verify, VerifyConfig};
use svrs_core::netsim::CountingMode;
use svrs_core::problems::DeltaSource;

#[derive(Parser)]
#[command(name = "svrs", version, about = "Seeded benchmarks and invariant checks for gradient-sliding solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seed sweep and write traces, summary.csv and plot.gp.
    Run(RunArgs),
    /// Run the invariant suite and print a JSON report.
    Verify {
        /// Smaller sample sizes.
        #[arg(long)]
        quick: bool,
        /// Also write the report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a gnuplot script for the trace CSVs in a directory.
    Plot {
        /// Directory holding trace CSVs (default: the output directory).
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Script path (default: DIR/plot.gp).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Lower-bound instance checks.
    Hardlab {
        #[command(subcommand)]
        command: HardlabCommand,
    },
}

#[derive(Subcommand)]
enum HardlabCommand {
    /// Similarity, prox, minimizer and information-expansion checks as JSON.
    Verify {
        /// Tracked runs per solver.
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mu: Option<f64>,
    /// Seed list: `0,3,7` or a half-open range `0..50`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_parser = ["paper", "exact"])]
    counting: Option<String>,
    /// Interpolation scale for the accelerated solver; a comma list runs one entry per value.
    #[arg(long, value_delimiter = ',')]
    tau_scale: Vec<f64>,
    /// Comma list of solvers (svrs, accsvrs, loopless, svrp).
    #[arg(long, value_delimiter = ',')]
    solvers: Vec<String>,
    /// Similarity modulus declared to the solvers.
    #[arg(long, value_parser = ["paper", "exact"])]
    delta_source: Option<String>,
    /// Synthetic problem at d=100, n=400.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long)]
    max_comm: Option<u64>,
    /// Output directory (the environment override still wins).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_seeds(s: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a >= b {
            bail!("empty seed range {s}");
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|t| t.trim().parse::<u64>().with_context(|| format!("bad seed `{t}`"))).collect()
}

fn build_config(a: &RunArgs) -> anyhow::Result<BenchConfig> {
    let mut cfg = match &a.config {
        Some(p) => BenchConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => BenchConfig::default(),
    };
    if a.full {
        cfg.use_full_scale()?;
    }
    if let Some(mu) = a.mu {
        cfg.set_mu(mu);
    }
    if let Some(src) = &a.delta_source {
        match &mut cfg.problem {
            ProblemConfig::Synthetic(s) => s.delta_source = src.parse::<DeltaSource>().map_err(anyhow::Error::msg)?,
            _ => bail!("--delta-source applies to synthetic problems only"),
        }
    }
    if let Some(s) = &a.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    if let Some(e) = a.eps {
        cfg.eps = e;
    }
    if let Some(c) = &a.counting {
        cfg.counting = c.parse::<CountingMode>().map_err(anyhow::Error::msg)?;
    }
    if !a.solvers.is_empty() {
        cfg.solvers = a
            .solvers
            .iter()
            .map(|s| s.parse::<SolverKind>().map(SolverConfig::new))
            .collect::<Result<_, _>>()?;
    }
    match a.tau_scale.as_slice() {
        [] => {}
        [s] => cfg.set_tau_scale(*s),
        grid => cfg.expand_tau_grid(grid),
    }
    if a.max_iters.is_some() {
        cfg.max_iters = a.max_iters;
    }
    if a.max_comm.is_some() {
        cfg.max_comm = a.max_comm;
    }
    if let Some(o) = &a.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_stat(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.0}")
    } else {
        "inf".into()
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let cfg = build_config(&args)?;
            let out = svrs_bench::run(&cfg)?;
            println!("{:<16} {:>6} {:>8} {:>12} {:>12} {:>12}", "solver", "seeds", "reached", "median_comm", "iqr_comm", "median_grads");
            for r in &out.summary {
                println!(
                    "{:<16} {:>6} {:>8} {:>12} {:>12} {:>12}",
                    r.solver,
                    r.seeds,
                    r.reached,
                    fmt_stat(r.median_comm),
                    fmt_stat(r.iqr_comm),
                    fmt_stat(r.median_grads)
                );
            }
            println!("wrote {} traces to {}", out.traces.len(), out.dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { quick, output } => {
            let cfg = if quick { SuiteConfig::quick() } else { SuiteConfig::default() };
            let report = run_suite(&cfg)?;
            let json = serde_json::to_string_pretty(&report)?;
            println!("{json}");
            if let Some(p) = output {
                std::fs::write(&p, format!("{json}\n"))?;
            }
            Ok(if report.all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Plot { dir, output } => {
            let dir = dir.unwrap_or_else(|| BenchConfig::default().resolved_output_dir());
            let curves = find_traces(&dir).with_context(|| format!("listing {}", dir.display()))?;
            let script = output.unwrap_or_else(|| dir.join("plot.gp"));
            write_plotscript(&curves, &script)?;
            println!("wrote {} curves to {}", curves.len(), script.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Hardlab { command: HardlabCommand::Verify { runs, seed } } => {
            let report = verify(&VerifyConfig { runs, seed, ..VerifyConfig::default() })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
