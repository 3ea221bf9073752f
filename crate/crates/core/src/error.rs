use thiserror::Error;

/// Errors raised by state construction, validation and parameter checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a structural invariant (Hermiticity, trace, positivity, norm, unitarity).
    #[error("validation failed: {0}")]
    Validation(String),
    /// An argument was outside its documented domain.
    #[error("invalid argument: {0}")]
    Usage(String),
    /// A state descriptor could not be parsed.
    #[error("malformed descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
