use thiserror::Error;

/// Errors produced anywhere in the simulator or the estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("absorption table row {row}: {reason}")]
    Table { row: usize, reason: String },

    #[error("frequency {freq_hz} Hz outside absorption table range [{min_hz}, {max_hz}] Hz")]
    OutOfRange {
        freq_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("zero signal power: cannot calibrate noise")]
    ZeroSignal,

    #[error("estimate degenerate: {0}")]
    Degenerate(String),

    #[error("pilot matrix rank deficient: rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("SVD failed to converge")]
    Svd,

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("dataset rejected: {0}")]
    Dataset(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
