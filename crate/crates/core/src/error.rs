use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point has a zero coordinate (off the torus)")]
    OffTorus,

    #[error("axis {axis} out of range for {n_vars} variables")]
    AxisOutOfRange { axis: usize, n_vars: usize },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("sample point hits a pole or zero of a coordinate function")]
    PoleAtSample,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    /// CLI process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VerificationFailed(_) => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }
}
