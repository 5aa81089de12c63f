use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),

    #[error("channel file: {0}")]
    Io(String),
}
