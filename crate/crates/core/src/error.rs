use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{n} is outside the sieve range [1, {limit}]")]
    OutOfRange { n: u64, limit: u64 },

    /// The computation needs a larger sieve. `needed_log10` is log₁₀ of a
    /// limit that would suffice; it can be astronomically large, hence a float.
    #[error("resource exhausted: {what}; a sieve limit of about 10^{needed_log10:.2} would suffice")]
    ResourceExhausted { what: String, needed_log10: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
