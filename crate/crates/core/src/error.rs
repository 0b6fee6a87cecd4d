use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain mismatch: function lives on (0, {function}), functional on (0, {spec})")]
    DomainMismatch { function: f64, spec: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("weight violates non-degeneracy: {0}")]
    NonDegeneracy(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
