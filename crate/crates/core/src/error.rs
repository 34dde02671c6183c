use thiserror::Error;

/// Errors surfaced by the code-construction and decoding pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Something that the construction guarantees failed anyway; indicates a
    /// corrupted code structure or a bug, not bad user input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
