use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank deficient: |R[{index},{index}]| = {value:e} is below {threshold:e}")]
    RankDeficient {
        index: usize,
        value: f64,
        threshold: f64,
    },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("degenerate labels: all generated labels are {0}")]
    DegenerateLabels(f64),
    #[error("zero column {0} in data matrix")]
    ZeroColumn(usize),
    #[error("batch index {index} out of range for {n} samples")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("zero vector encountered in basis column {0}")]
    ZeroVector(usize),
    #[error("zero diagonal in Gram system at row {0}")]
    ZeroDiagonal(usize),
    #[error("matrix is not symmetric positive definite (pivot {0} at row {1})")]
    NotSpd(f64, usize),
    #[error("non-finite gradient at iteration {0}")]
    NonFiniteGradient(usize),
    #[error("gradient oracle failed: {0}")]
    OracleFailure(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad problem dump: {0}")]
    BadDump(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
