use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate squaring-up: {0}")]
    DegenerateSquaring(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
