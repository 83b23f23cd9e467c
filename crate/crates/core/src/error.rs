use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("unsupported modulation order {0} (expected one of 2, 4, 16, 64)")]
    UnsupportedOrder(usize),

    #[error("bit sequence of length {len} is not a multiple of {bits_per_symbol}")]
    BitLength { len: usize, bits_per_symbol: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("exhaustive search over {candidates} candidates exceeds the limit of {limit}")]
    CandidateLimit { candidates: u128, limit: u64 },

    #[error("parameter file field `{field}`: {reason}")]
    ParamField { field: &'static str, reason: String },

    #[error("unsupported parameter file version {found} (expected {expected})")]
    Version { found: i64, expected: i64 },

    #[error("non-finite training loss at step {step}")]
    NonFiniteLoss { step: usize },

    #[error("detector `{detector}` failed at {snr_db} dB: {source}")]
    Cell {
        detector: String,
        snr_db: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot load parameters from {path}: {source}")]
    ParamsPath {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
