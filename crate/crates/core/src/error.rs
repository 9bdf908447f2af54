use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range limit: {0}")]
    Range(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("sieve vacuous: {0}")]
    Vacuous(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
