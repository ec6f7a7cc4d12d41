use thiserror::Error;

/// Errors raised by the library. Each variant names the precondition or
/// invariant that failed so the CLI can report it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("construction unavailable: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("oracle did not converge after {restarts} restarts (best value {best})")]
    NotConverged { restarts: usize, best: f64 },

    #[error("rejection budget exhausted: accepted {accepted} of {requested} after {draws} draws")]
    RejectionBudget {
        accepted: usize,
        requested: usize,
        draws: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
