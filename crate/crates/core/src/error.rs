use thiserror::Error;

/// Errors shared across all backends and the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or incompatible input (shape mismatch, bad range, empty data).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix expected to be symmetric positive-definite has an eigenvalue
    /// at or below the floor of 1e-12.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// An iterative routine exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
