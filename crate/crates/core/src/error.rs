use thiserror::Error;

use crate::quadrature::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series has the wrong leading structure for the requested operation.
    #[error("structural error: {0}")]
    Structural(String),

    /// Saddle labels could not be assigned unambiguously.
    #[error("classification error: {0}")]
    Classification(String),

    /// A numerical procedure did not reach its tolerance; the best estimate is kept.
    #[error("accuracy error: {message}")]
    Accuracy {
        message: String,
        best: Option<Box<QuadratureResult>>,
    },

    /// NaN or infinite component where a finite value is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("precision must be at least {min} digits, got {got}")]
    Precision { got: u32, min: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    /// An iteration in the series ring failed to settle.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}
