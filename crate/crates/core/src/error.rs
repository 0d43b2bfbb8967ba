use thiserror::Error;

use crate::config::ConfigError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected} elements, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("half-power crossing not bracketed within {limit_deg} degrees of the peak")]
    NotBracketed { limit_deg: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("nodes {0} and {1} are at the same position")]
    CoincidentNodes(usize, usize),

    #[error("UE {0} is not covered by any measurement report")]
    MissingReport(usize),

    #[error("UE {ue} is not scheduled on RB {rb}")]
    NotScheduled { ue: usize, rb: usize },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
