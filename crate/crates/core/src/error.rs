use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has no entries")]
    EmptyMatrix,
    #[error("entry count {actual} does not match shape (expected {expected})")]
    InvalidLength { expected: usize, actual: usize },
    #[error("rows have unequal lengths")]
    RaggedRows,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("block has shape {actual:?}, expected {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("{name} out of range {range}: {value}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown matrix family '{0}'")]
    UnknownFamily(String),
    #[error("unknown check id '{0}'")]
    UnknownCheck(String),
    #[error("check {check} requires auxiliary input '{extra}'")]
    MissingExtra {
        check: &'static str,
        extra: &'static str,
    },
    #[error("lambda must be nonzero")]
    ZeroLambda,
}
