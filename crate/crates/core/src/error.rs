use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("eigendecomposition failed its residual check ({residual:e})")]
    EigenFailure { residual: f64 },
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(String),
    #[error("index {index} out of range 0..{len}")]
    OutOfRange { index: usize, len: usize },
    #[error("zero-error violation on input {input}: wrong-answer weight {weight:e}")]
    ZeroErrorViolation { input: usize, weight: f64 },
    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),
    #[error("malformed subroutine: {0}")]
    MalformedSubroutine(String),
    #[error("infeasible partition request: {0}")]
    InfeasiblePartition(String),
    #[error("unsupported oracle: {0}")]
    UnsupportedOracle(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid cost profile: {0}")]
    InvalidProfile(String),
    #[error("missing promise parameter: {0}")]
    MissingPromise(String),
    #[error("marked set is empty")]
    EmptyMarkedSet,
    #[error("marked element present: {0}")]
    MarkedElementPresent(usize),
    #[error("invalid decision constants: {0}")]
    InvalidConstants(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("wrong instance variant: {0}")]
    WrongVariant(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
