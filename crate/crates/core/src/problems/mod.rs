//! Concrete workloads: synthetic similarity-controlled ridge regression and
//! LIBSVM ingestion with contiguous client splitting.

mod libsvm;
mod ridge;
mod synthetic;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use libsvm::{load_libsvm, parse_line, read_libsvm, rows_to_problem, LibsvmRow};
pub use ridge::{ridge_prox, RidgeComponent};
pub use synthetic::{gen_synthetic, paper_delta, SyntheticSpec};

use crate::numkit::{DenseMatrix, DenseVector};
use crate::oracle::{exact_avess_quadratic, ComponentOracle, Optimum, Problem, ProblemDescriptor, SharedComponent};
use crate::{Real, Result};

/// Which similarity modulus a ridge problem declares to the solvers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaSource {
    /// RMS spectral deviation of the feature matrices.
    #[default]
    Paper,
    /// Exact average Hessian similarity.
    Exact,
}

impl std::str::FromStr for DeltaSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(Self::Paper),
            "exact" => Ok(Self::Exact),
            other => Err(format!("unknown delta source `{other}` (expected paper|exact)")),
        }
    }
}

/// Wraps ridge components into a problem with its exact optimum.
///
/// A declared modulus below `mu` is raised to `mu`: any δ-similar family is
/// also δ'-similar for δ' ≥ δ.
pub(crate) fn assemble_ridge<T: Real>(
    comps: Vec<RidgeComponent<T>>,
    mu: T,
    delta_paper: T,
    source: DeltaSource,
    kind: &str,
    seed: Option<u64>,
) -> Result<Problem<T>> {
    let d = comps[0].dim();
    let n = comps.len();
    let hessians: Vec<DenseMatrix<T>> = comps.iter().map(|c| c.hessian_matrix()).collect();
    let delta_exact = exact_avess_quadratic(&hessians)?;
    let inv_n = T::one() / T::from_usize_lossy(n);
    let mut mean_h = DenseMatrix::zeros(d, d);
    let mut mean_b = DenseVector::zeros(d);
    for c in &comps {
        mean_h = mean_h.add(&c.hessian_matrix());
        mean_b.axpy(T::one(), &c.features().matvec(c.labels()));
    }
    let mean_h = mean_h.scaled(inv_n);
    let mean_h = mean_h.add(&mean_h.transpose()).scaled(T::lit(0.5));
    mean_b.scale_mut(inv_n);
    let x_star = mean_h.cholesky()?.solve(&mean_b);
    let smoothness = comps.iter().filter_map(|c| c.smoothness()).fold(T::zero(), |a, b| a.max(b));
    let declared = match source {
        DeltaSource::Paper => delta_paper,
        DeltaSource::Exact => delta_exact,
    }
    .max(mu);
    let shared: Vec<SharedComponent<T>> = comps.into_iter().map(|c| Arc::new(c) as SharedComponent<T>).collect();
    let problem = Problem::new(shared, mu, declared)?;
    let value = problem.full_value(&x_star)?;
    let descriptor = ProblemDescriptor {
        kind: kind.to_string(),
        d,
        n,
        mu: mu.as_f64(),
        delta_paper: Some(delta_paper.as_f64()),
        delta_exact: Some(delta_exact.as_f64()),
        smoothness: Some(smoothness.as_f64()),
        seed,
    };
    problem
        .with_optimum(Optimum { x: x_star, value, mean_hessian: Some(mean_h) })
        .map(|p| p.with_descriptor(descriptor))
}
