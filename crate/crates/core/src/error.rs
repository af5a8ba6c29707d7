use thiserror::Error;

/// Errors raised across the library.
///
/// `Hypothesis` is reserved for violated theorem preconditions so that front
/// ends can distinguish them from malformed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("enumeration infeasible: {what} requires {size} configurations (limit {limit})")]
    Infeasible { what: &'static str, size: f64, limit: f64 },

    #[error("count overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than the environment.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
