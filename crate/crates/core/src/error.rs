use thiserror::Error;

/// Errors produced by operator application, sampling, chains and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value encountered: {0}")]
    Numeric(String),

    #[error("solver did not converge: {0}")]
    Solver(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("operation not supported for this operator family: {0}")]
    UnsupportedOperator(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("row {0} is unusable (norm below threshold)")]
    RowSkipped(usize),

    /// A quantity violates a structural identity that should hold by
    /// construction (e.g. merit zero at an infeasible probe).
    #[error("inconsistency detected: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
