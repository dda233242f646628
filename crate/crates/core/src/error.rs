use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("pole at {0}")]
    Pole(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("table covers n <= {have}, need n <= {need}")]
    TableShortfall { need: u64, have: u64 },
    #[error("quadrature did not converge: |value| = {value:e}, last change {change:e}")]
    Quadrature { value: f64, change: f64 },
    #[error("vanishing denominator (|value| = {0:e})")]
    VanishingDenominator(f64),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("empty q-range: no q in ({lo}, {hi}) squarefree and coprime to 6")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("missing data: {0}")]
    Missing(String),
    #[error("checksum mismatch for {0}")]
    Checksum(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
