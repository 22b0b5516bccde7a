use thiserror::Error;

/// Errors raised while building models, geometry, or running experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid heavy-traffic target: {0}")]
    InvalidTarget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arrival direction is not on the capacity-region boundary (closest facet gap {gap:.3e})")]
    NotOnBoundary { gap: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("capacity region failed validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
