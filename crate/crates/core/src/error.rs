use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace must be 1 (got {0})")]
    InvalidTrace(f64),

    #[error("vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not an isometry (deviation {0:.3e})")]
    NotIsometric(f64),

    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("functional returned a non-finite value ({0})")]
    NonFinite(f64),

    #[error("numerically ambiguous: {0}")]
    Ambiguous(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed or invalid caller input, as opposed
    /// to numerical ambiguity or an input class the algorithms do not support.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Unsupported(_) | Error::Ambiguous(_) | Error::NonFinite(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
