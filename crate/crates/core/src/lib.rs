//! Communication-efficient distributed finite-sum optimization under
//! second-order similarity: variance-reduced gradient sliding solvers, a
//! star-network communication ledger, a lower-bound hard instance and
//! ridge-regression workloads.

// `!(x > 0.0)` is used on purpose so NaN fails parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scalar;

pub mod numkit;
pub mod hardlab;
pub mod netsim;
pub mod oracle;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vector = numkit::DenseVector<f64>;
pub type Matrix = numkit::DenseMatrix<f64>;
pub type F64Problem = oracle::Problem<f64>;
