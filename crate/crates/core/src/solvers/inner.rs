use serde::{Deserialize, Serialize};

use crate::netsim::NetProblem;
use crate::numkit::DenseVector;
use crate::oracle::Problem;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMode {
    /// Closed-form prox of the master component.
    #[default]
    ExactQuadratic,
    /// Accelerated gradient descent on the subproblem.
    Agd,
}

impl std::str::FromStr for InnerMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" | "exact_quadratic" => Ok(Self::ExactQuadratic),
            "agd" => Ok(Self::Agd),
            other => Err(format!("unknown inner mode `{other}` (expected exact|agd)")),
        }
    }
}

/// How each proximal subproblem
/// `A(x) = <v, x - x_t> + ||x - x_t||²/(2θ) + f_1(x)` is solved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerSolveSpec {
    pub mode: InnerMode,
    /// Strong convexity constant in the acceptance test.
    pub mu_for_criterion: f64,
    /// Smoothness of the master component (needed by `Agd`).
    pub master_smoothness: Option<f64>,
    /// `√n δ`: the subproblem is `(1/θ - √n δ)`-strongly convex.
    pub sqrt_n_delta: f64,
    /// Overrides the default iteration budget.
    pub max_iters: Option<usize>,
    /// Multiplies the acceptance bound (`1` is the plain criterion; smaller is stricter).
    #[serde(default = "unit")]
    pub accuracy: f64,
}

fn unit() -> f64 {
    1.0
}

impl InnerSolveSpec {
    pub fn exact<T: Real>(problem: &Problem<T>) -> Result<Self> {
        if !problem.component(problem.master()).has_closed_prox() {
            return Err(Error::InvalidParameter("exact inner mode needs a closed-form master prox".into()));
        }
        Ok(Self::new(problem, InnerMode::ExactQuadratic))
    }

    /// Same criterion scaled by `accuracy ∈ (0, 1]`.
    pub fn with_accuracy(mut self, accuracy: f64) -> Result<Self> {
        if !(accuracy > 0.0 && accuracy <= 1.0) {
            return Err(Error::InvalidParameter(format!("accuracy must lie in (0, 1], got {accuracy}")));
        }
        self.accuracy = accuracy;
        Ok(self)
    }

    pub fn agd<T: Real>(problem: &Problem<T>) -> Result<Self> {
        let spec = Self::new(problem, InnerMode::Agd);
        if spec.master_smoothness.is_none() {
            return Err(Error::InvalidParameter("agd inner mode needs the master smoothness".into()));
        }
        Ok(spec)
    }

    fn new<T: Real>(problem: &Problem<T>, mode: InnerMode) -> Self {
        let master = problem.component(problem.master());
        Self {
            mode,
            mu_for_criterion: problem.mu().as_f64(),
            master_smoothness: master.smoothness().map(Real::as_f64),
            sqrt_n_delta: (problem.n() as f64).sqrt() * problem.delta().as_f64(),
            max_iters: None,
            accuracy: 1.0,
        }
    }

    /// `4 ⌈√κ' (ln(1 + 400 μ' L' θ κ'² / (3μ)) + ln(1/accuracy))⌉` with
    /// `L' = 1/θ + L`, `μ' = 1/θ - √n δ` and `κ' = L'/μ'`.
    pub fn budget(&self, theta: f64) -> usize {
        if let Some(m) = self.max_iters {
            return m;
        }
        let l = self.master_smoothness.unwrap_or(0.0);
        let lp = 1.0 / theta + l;
        let mp = self.strong_convexity(theta);
        let kappa = lp / mp;
        let log = (1.0 + 400.0 * mp * lp * theta * kappa * kappa / (3.0 * self.mu_for_criterion)).ln()
            + (1.0 / self.accuracy.min(1.0)).ln();
        let t = kappa.sqrt() * log;
        4 * (t.ceil() as usize).max(1)
    }

    fn strong_convexity(&self, theta: f64) -> f64 {
        let mp = 1.0 / theta - self.sqrt_n_delta;
        // the declared δ may be loose; never go below a tiny fraction of 1/θ
        mp.max(1e-3 / theta)
    }
}

/// One accepted inner solution: `||∇A(x_{t+1})||²` against the enforced bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lhs: f64,
    pub rhs: f64,
    pub iters: usize,
    /// The bound was raised to the round-off floor of `∇A`.
    #[serde(default)]
    pub floored: bool,
}

/// Running summary of certificates for one solver run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateLog {
    pub count: u64,
    pub violations: u64,
    pub inner_iters: u64,
    /// Solves whose bound sat below the round-off floor.
    #[serde(default)]
    pub floored: u64,
    /// Largest `lhs/rhs` seen (0 when every lhs is 0).
    pub max_ratio: f64,
    #[serde(skip)]
    entries: Option<Vec<Certificate>>,
}

impl CertificateLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn keeping_entries() -> Self {
        Self { entries: Some(Vec::new()), ..Self::default() }
    }

    pub fn push(&mut self, c: Certificate) {
        self.count += 1;
        self.inner_iters += c.iters as u64;
        self.floored += c.floored as u64;
        if !(c.lhs <= c.rhs) {
            self.violations += 1;
        }
        if c.lhs > 0.0 {
            self.max_ratio = self.max_ratio.max(c.lhs / c.rhs);
        }
        if let Some(e) = &mut self.entries {
            e.push(c);
        }
    }

    pub fn entries(&self) -> Option<&[Certificate]> {
        self.entries.as_deref()
    }

    pub fn merge(&mut self, other: &CertificateLog) {
        self.count += other.count;
        self.violations += other.violations;
        self.inner_iters += other.inner_iters;
        self.floored += other.floored;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
    }
}

/// `∇A(x) = v + (x - x_t)/θ + ∇f_1(x)`.
fn grad_a<T: Real>(
    np: &mut NetProblem<'_, T>,
    x: &DenseVector<T>,
    x_t: &DenseVector<T>,
    v: &DenseVector<T>,
    theta: T,
) -> Result<DenseVector<T>> {
    let mut g = np.master_gradient(x)?;
    g += v;
    g.axpy(T::one() / theta, &(x - x_t));
    Ok(g)
}

/// Approximately minimizes `A(x) = <v, x - x_t> + ||x - x_t||²/(2θ) + f_1(x)`.
///
/// Exact mode returns `prox_{f_1}^θ(x_t - θv)` with a zero residual. AGD mode
/// stops at the first point with
/// `||∇A(x)||² ≤ (μ/20θ) (||∇A(x_t)||/L_A)²`, `L_A = 1/θ + L`, which implies
/// `||∇A(x)||² ≤ (μ/20θ) ||x_t - argmin A||²`. Running out of budget is an error.
///
/// `∇A` cannot be evaluated more accurately than `ε_mach` times the size of its
/// terms, so a bound below `(64 ε_mach s)²`, `s = ||∇f_1(x_t)|| + ||v|| + L||x_t||`,
/// is raised to that floor and the certificate is marked `floored`.
pub fn solve_inner<T: Real>(
    np: &mut NetProblem<'_, T>,
    x_t: &DenseVector<T>,
    v: &DenseVector<T>,
    theta: T,
    spec: &InnerSolveSpec,
    certs: &mut CertificateLog,
) -> Result<DenseVector<T>> {
    let th = theta.as_f64();
    let mu = spec.mu_for_criterion;
    match spec.mode {
        InnerMode::ExactQuadratic => {
            let mut shifted = x_t.clone();
            shifted.axpy(-theta, v);
            let x_next = np.master_prox(&shifted, theta)?;
            if !x_next.is_finite() {
                return Err(Error::NonFinite("inner prox"));
            }
            let rhs = mu / (20.0 * th) * x_t.dist_sq(&x_next).as_f64();
            certs.push(Certificate { lhs: 0.0, rhs, iters: 0, floored: false });
            Ok(x_next)
        }
        InnerMode::Agd => {
            let l = spec
                .master_smoothness
                .ok_or_else(|| Error::InvalidParameter("agd inner mode needs the master smoothness".into()))?;
            let l_a = 1.0 / th + l;
            let mu_a = spec.strong_convexity(th);
            let kappa = l_a / mu_a;
            let momentum = T::lit((kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0));
            let step = T::lit(1.0 / l_a);
            let g0 = grad_a(np, x_t, x_t, v, theta)?;
            let g0_norm = g0.norm().as_f64();
            let wanted = spec.accuracy * mu / (20.0 * th) * (g0_norm / l_a).powi(2);
            let size = (&g0 - v).norm().as_f64() + v.norm().as_f64() + l * x_t.norm().as_f64();
            let floor = (64.0 * T::epsilon().as_f64() * size).powi(2);
            let (rhs, floored) = if wanted < floor { (floor, true) } else { (wanted, false) };
            let budget = spec.budget(th);
            let mut y = x_t.clone();
            let mut x_prev = x_t.clone();
            let mut g = g0;
            for iter in 0..=budget {
                let lhs = g.norm_sq().as_f64();
                if !lhs.is_finite() {
                    return Err(Error::NonFinite("inner gradient"));
                }
                if lhs <= rhs {
                    certs.push(Certificate { lhs, rhs, iters: iter, floored });
                    return Ok(y);
                }
                if iter == budget {
                    return Err(Error::InexactSolve { iters: budget, lhs, rhs });
                }
                let mut x_new = y.clone();
                x_new.axpy(-step, &g);
                y = DenseVector::lincomb(T::one() + momentum, &x_new, -momentum, &x_prev);
                x_prev = x_new;
                g = grad_a(np, &y, x_t, v, theta)?;
            }
            unreachable!("loop returns on the last iteration")
        }
    }
}
