use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request would exceed a sieve, table or memory limit.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A parameter combination the operation is not configured for.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed textual input (character labels and the like).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
