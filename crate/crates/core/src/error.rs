use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node finding did not converge for degree {degree}")]
    Convergence { degree: usize },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("cubature degree {available} is below the required {required}")]
    InsufficientDegree { required: usize, available: usize },

    #[error("non-finite integrand value at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Failures caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::NonFinite { .. })
    }
}
