use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("component {0} has no proximal oracle")]
    NoProx(usize),

    #[error("inner solve not certified after {iters} iterations (|grad A|^2 = {lhs:e}, bound = {rhs:e})")]
    InexactSolve { iters: usize, lhs: f64, rhs: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("need {needed} rows but the file only has {available}")]
    InsufficientRows { needed: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
