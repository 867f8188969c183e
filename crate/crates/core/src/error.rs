use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its documented range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The caller broke a precondition (non-symmetric input, kernel mismatch, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed serialized input. `offset` is a byte offset for model files
    /// and a 1-based row number for CSV files, as named in `what`.
    #[error("parse error at {what} {offset}: {message}")]
    Parse {
        what: &'static str,
        offset: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
