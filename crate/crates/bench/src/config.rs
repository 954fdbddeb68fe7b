use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use svrs_core::hardlab::HardInstance;
use svrs_core::netsim::CountingMode;
use svrs_core::oracle::Problem;
use svrs_core::problems::{gen_synthetic, load_libsvm, DeltaSource, SyntheticSpec};
use svrs_core::solvers::InnerMode;

use crate::{BenchError, Result};

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "SVRS_OUTPUT_DIR";

/// Interpolation scales tried by the τ sweep.
pub const TAU_SCALE_GRID: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemConfig {
    Synthetic(SyntheticSpec),
    Libsvm { path: PathBuf, n_clients: usize, per_client: usize, mu: f64 },
    Hard { n: usize, delta: f64, mu: f64, gap0: f64, m: usize },
}

impl ProblemConfig {
    /// Desk-scale ridge problem: d=30, n=40, well-separated base spectrum,
    /// small perturbations, exact similarity declared.
    pub fn desk(mu: f64) -> Self {
        Self::Synthetic(SyntheticSpec {
            d: 30,
            n: 40,
            base_norm: 10.0,
            perturb_norm: 0.1,
            mu,
            seed: 0,
            delta_source: DeltaSource::Exact,
        })
    }

    pub fn build(&self) -> Result<Problem<f64>> {
        Ok(match self {
            Self::Synthetic(spec) => gen_synthetic(spec)?,
            Self::Libsvm { path, n_clients, per_client, mu } => load_libsvm(path, *n_clients, *per_client, *mu)?,
            Self::Hard { n, delta, mu, gap0, m } => HardInstance::scaled(*n, *delta, *mu, *gap0, *m)?.problem()?,
        })
    }

    fn set_mu(&mut self, value: f64) {
        match self {
            Self::Synthetic(s) => s.mu = value,
            Self::Libsvm { mu, .. } | Self::Hard { mu, .. } => *mu = value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Svrs,
    AccSvrs,
    Loopless,
    Svrp,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Svrs => "svrs",
            Self::AccSvrs => "accsvrs",
            Self::Loopless => "loopless",
            Self::Svrp => "svrp",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svrs" => Ok(Self::Svrs),
            "accsvrs" => Ok(Self::AccSvrs),
            "loopless" => Ok(Self::Loopless),
            "svrp" => Ok(Self::Svrp),
            other => Err(BenchError::Config(format!("unknown solver `{other}` (expected svrs|accsvrs|loopless|svrp)"))),
        }
    }
}

/// One solver entry with optional hyperparameter overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub name: SolverKind,
    /// Multiplies the default interpolation `τ` (accelerated method only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default)]
    pub inner: InnerMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_accuracy: Option<f64>,
}

impl SolverConfig {
    pub fn new(name: SolverKind) -> Self {
        Self { name, tau_scale: None, theta: None, p: None, inner: InnerMode::ExactQuadratic, inner_accuracy: None }
    }

    /// File-name label: the solver name, suffixed by a non-unit τ scale.
    pub fn label(&self) -> String {
        match self.tau_scale {
            Some(s) if s != 1.0 => format!("{}_s{}", self.name.as_str(), s),
            _ => self.name.as_str().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub problem: ProblemConfig,
    pub solvers: Vec<SolverConfig>,
    pub seeds: Vec<u64>,
    /// Target gap ε for communications-to-ε.
    pub eps: f64,
    /// Stop each run once its gap reaches `eps`.
    pub stop_at_eps: bool,
    /// Outer-iteration cap (unbounded when absent).
    pub max_iters: Option<u64>,
    /// Communication cap per run.
    pub max_comm: Option<u64>,
    pub counting: CountingMode,
    pub output_dir: PathBuf,
    /// Trace rows kept per CSV (0 keeps all). The first row at or below `eps`
    /// and the final row are always kept.
    pub max_rows: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            problem: ProblemConfig::desk(1e-2),
            solvers: [SolverKind::AccSvrs, SolverKind::Svrs, SolverKind::Svrp].map(SolverConfig::new).to_vec(),
            seeds: (0..10).collect(),
            eps: 1e-6,
            stop_at_eps: true,
            max_iters: None,
            max_comm: Some(5_000_000),
            counting: CountingMode::Paper,
            output_dir: PathBuf::from("svrs-out"),
            max_rows: 2000,
        }
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        let mut labels = std::collections::BTreeSet::new();
        for s in &self.solvers {
            if let Some(t) = s.tau_scale {
                if !(t > 0.0) {
                    return bad(format!("tau_scale must be positive, got {t}"));
                }
                if s.name != SolverKind::AccSvrs {
                    return bad(format!("tau_scale only applies to accsvrs, not {}", s.name.as_str()));
                }
            }
            if !labels.insert(s.label()) {
                return bad(format!("solver `{}` listed twice", s.label()));
            }
        }
        if self.max_iters == Some(0) {
            return bad("max_iters must be positive".into());
        }
        if self.stop_at_eps && self.max_iters.is_none() && self.max_comm.is_none() {
            // a run that never reaches eps would not terminate
            return bad("set max_iters or max_comm".into());
        }
        Ok(())
    }

    /// Output directory after the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        }
    }

    pub fn set_mu(&mut self, mu: f64) {
        self.problem.set_mu(mu);
    }

    /// Switches a synthetic problem to d=100, n=400 with the large base spectrum.
    pub fn use_full_scale(&mut self) -> Result<()> {
        match &mut self.problem {
            ProblemConfig::Synthetic(s) => {
                let full = SyntheticSpec::default();
                s.d = full.d;
                s.n = full.n;
                s.base_norm = full.base_norm;
                s.perturb_norm = full.perturb_norm;
                Ok(())
            }
            _ => Err(BenchError::Config("--full applies to synthetic problems only".into())),
        }
    }

    /// Sets `s` on every accelerated entry.
    pub fn set_tau_scale(&mut self, s: f64) {
        for e in self.solvers.iter_mut().filter(|e| e.name == SolverKind::AccSvrs) {
            e.tau_scale = Some(s);
        }
    }

    /// Replaces accelerated entries by one per value of `grid`.
    pub fn expand_tau_grid(&mut self, grid: &[f64]) {
        let mut out = Vec::new();
        for e in &self.solvers {
            if e.name == SolverKind::AccSvrs {
                out.extend(grid.iter().map(|&s| SolverConfig { tau_scale: Some(s), ..e.clone() }));
            } else {
                out.push(e.clone());
            }
        }
        self.solvers = out;
    }
}
