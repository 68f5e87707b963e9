use thiserror::Error;

/// Errors raised across the model, agent, environments and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot:e})")]
    NotPositiveDefinite { pivot: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("operation requires at least one mixture component")]
    EmptyModel,

    #[error("step called on a finished episode")]
    StepAfterEnd,

    #[error("unknown environment `{0}`")]
    UnknownEnv(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed model file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
