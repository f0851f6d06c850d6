use thiserror::Error;

/// Errors raised by the numerical routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// Array lengths or domain tags do not match the grid contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A physical parameter is outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// The grid cannot resolve the requested state or transformation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// An operation precondition does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The input is valid but this operation does not support it.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Resampling lost more norm than tolerated.
    #[error("interpolation failure: {0}")]
    Interpolation(String),

    /// A limit procedure did not settle within its budget.
    #[error("not converged: {0}")]
    NonConvergence(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
