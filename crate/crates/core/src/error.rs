use thiserror::Error;

/// Errors surfaced by samplers, oracles and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("state space too large: {0}")]
    StateSpaceTooLarge(String),

    #[error("schedule saturated: {0}")]
    SaturatedSchedule(String),

    #[error("spectrum constraint violated: {0}")]
    SpectrumOutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
