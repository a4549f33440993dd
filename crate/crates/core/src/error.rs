use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// The graph is not connected and no override was given.
    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    /// An iterative method failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An argument fell outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or vector dimensions do not agree.
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    /// An exact integer result is not representable.
    #[error("integer overflow: {0}")]
    Range(String),

    /// The noise model does not support the requested operation.
    #[error("unsupported noise model: {0}")]
    Unsupported(String),

    /// A brute-force oracle was asked for an instance that is too large.
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
