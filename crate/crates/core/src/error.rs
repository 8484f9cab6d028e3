use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cost requires at least one center")]
    NoCenters,

    #[error("operation requires a non-empty point set")]
    EmptySet,

    #[error("degenerate D² distribution: every point coincides with a center")]
    DegenerateDistribution,

    #[error("instance too large for exact solver: n = {n} (max {max})")]
    InstanceTooLarge { n: usize, max: usize },

    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("non-finite coordinate at point {point}, column {column}")]
    NonFinite { point: usize, column: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("malformed dataset: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
