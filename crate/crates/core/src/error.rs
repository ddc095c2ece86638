use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("gluing error: {0}")]
    Glue(String),
    #[error("orientation error: {0}")]
    Orientation(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("integration error: {0}")]
    Integration(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
