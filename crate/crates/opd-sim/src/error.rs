use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("dataset schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("dataset generation failed: {0}")]
    Generation(String),
    #[error("arrival sampling failed: {0}")]
    Arrivals(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    pub fn is_io(&self) -> bool {
        matches!(self, SimError::Io(_))
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> SimError {
    SimError::Validation(msg.into())
}
