use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("odd real dimension {0} cannot carry a complex structure")]
    OddDimension(usize),

    #[error("not Kähler: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotKahler { residual: f64, tolerance: f64 },

    #[error("first Bianchi identity violated: residual {residual:e} exceeds tolerance {tolerance:e}")]
    BianchiViolation { residual: f64, tolerance: f64 },

    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("file format: {0}")]
    Format(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
