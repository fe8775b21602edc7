use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the clustering pipeline.
#[derive(Debug, Error)]
pub enum WfrError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("dataset must contain at least one point")]
    EmptyDataset,

    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("ragged point matrix: row {row} has {got} values, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid neighbor count k={k} for n={n} points (need 1 <= k <= n-1)")]
    InvalidK { k: usize, n: usize },

    #[error("threshold {0} outside [0, 1]")]
    ThresholdOutOfRange(f64),

    #[error("cosine resemblance undefined for zero-norm point")]
    ZeroNorm,

    #[error("no edge scores to normalize")]
    EmptyEdges,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no non-outlier clusters")]
    NoClusters,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid label {0} (expected a cluster id >= 0 or -1)")]
    InvalidLabel(i64),

    #[error("covariance matrix {index} is not symmetric positive semi-definite")]
    InvalidCovariance { index: usize },

    #[error("{path}: row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("model file: {0}")]
    Model(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, WfrError>;
