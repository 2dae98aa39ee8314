use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A count parameter fell outside its admissible range.
    #[error("{what} must be in [{min}, {max}], got {got}")]
    OutOfRange {
        what: &'static str,
        got: usize,
        min: usize,
        max: usize,
    },
    #[error("{0}")]
    Domain(String),
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
