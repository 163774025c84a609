use thiserror::Error;

use crate::quantum::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("strategy failed validation:\n{0}")]
    InvalidStrategy(ValidationReport),

    #[error("invalid classical strategy: {0}")]
    InvalidClassical(String),

    #[error("state space too large: {size} exceeds cap {cap}")]
    DimensionOverflow { size: u128, cap: u128 },

    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,

    #[error("no hidden pattern is consistent with the conditioning event")]
    EmptyPatternSet,

    #[error("inconsistent constraint system: {0}")]
    InconsistentSystem(String),

    #[error("malformed linear system: {0}")]
    MalformedProblem(String),

    #[error("numerically indeterminate: {0}")]
    Indeterminate(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
