use thiserror::Error;

use crate::quantities::Dimension;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Text could not be parsed; `token` is the offending piece of input.
    #[error("parse error at `{token}`: {message}")]
    Parse { token: String, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension {
        expected: Dimension,
        found: Dimension,
    },

    /// A value is outside the domain of a physical law (non-positive length, negative mass, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or insufficient input data.
    #[error("input error: {0}")]
    Input(String),

    /// The least-squares problem is singular or too badly conditioned to solve.
    #[error("singular fit: {0}")]
    Singular(String),

    #[error("model mismatch: record is a {record} bound, requested {requested}")]
    ModelMismatch { record: String, requested: String },

    /// Cross-model comparison of length bounds (R0 and a belong to different theories).
    #[error("cannot compare a {left} bound with a {right} bound")]
    IncomparableBounds { left: String, right: String },

    /// The residual upper limit is zero, so every length is allowed.
    #[error("no finite bound: residual upper limit is zero")]
    NoFiniteBound,

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
