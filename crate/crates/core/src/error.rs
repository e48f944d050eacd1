use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported variant: {0}")]
    Unsupported(String),

    #[error(
        "rejection envelope violated at step {step}: density {density:.6e} exceeds envelope {envelope:.6e}"
    )]
    EnvelopeViolation {
        step: usize,
        density: f64,
        envelope: f64,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("root finder returned {found} roots for a degree {expected} polynomial")]
    RootCount { expected: usize, found: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
