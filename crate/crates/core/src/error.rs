use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid case: {0}")]
    Validation(String),

    #[error("branch {from}-{to} has zero series impedance")]
    SingularBranch { from: i64, to: i64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grounded conductance matrix is singular at node {node}")]
    Singular { node: usize },

    #[error("node index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("edge count {m} out of range 1..={max}")]
    EdgeCountOutOfRange { m: usize, max: usize },

    #[error("instance too large for exhaustive search: n = {n}, limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("unknown bus label {0}")]
    UnknownBus(i64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
