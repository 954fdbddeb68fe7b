//! Seeded benchmark harness: configuration, parallel seed sweeps, comparison
//! tables, plotting scripts and the invariant verification suite.

// `!(x > 0.0)` is used on purpose so NaN fails parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod plot;
pub mod summary;
pub mod sweep;

pub use config::{BenchConfig, ProblemConfig, SolverConfig, SolverKind, OUTPUT_DIR_ENV};
pub use error::{BenchError, Result};
pub use summary::ComparisonRow;
pub use sweep::{run, RunOutput};
