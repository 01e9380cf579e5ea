use thiserror::Error;

use crate::models::VolatilityModelParams;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("forecast outside the action domain: var {var} < es {es}")]
    ActionDomain { var: f64, es: f64 },

    #[error("level must lie strictly between 0 and 1, got {0}")]
    InvalidLevel(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate threshold grid: range [{min}, {max}] has zero width")]
    DegenerateGrid { min: f64, max: f64 },

    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("degenerate likelihood: {0}")]
    DegenerateLikelihood(String),

    #[error("optimizer did not converge after {iterations} iterations (best log-likelihood {log_likelihood})")]
    NonConvergence {
        iterations: usize,
        log_likelihood: f64,
        best: VolatilityModelParams,
    },

    #[error("data error at line {line}: {message}")]
    Data { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::DegenerateLikelihood(_)
        )
    }

    /// True for failures caused by malformed or inconsistent data files.
    pub fn is_data(&self) -> bool {
        matches!(
            self,
            Error::Data { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::DimensionMismatch(_)
                | Error::InsufficientData { .. }
                | Error::DegenerateGrid { .. }
                | Error::ActionDomain { .. }
                | Error::NonFinite(_)
        )
    }
}

pub(crate) fn ensure_finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}
