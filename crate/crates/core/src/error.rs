use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A coefficient or prime index beyond the computed range was requested.
    #[error("index {needed} is outside the available range (max {available})")]
    Range { needed: u64, available: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Ingested data disagrees with a recomputed value.
    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
