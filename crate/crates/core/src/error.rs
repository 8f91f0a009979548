use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular: no acceptable pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("algebra is not regular (structure matrix is singular)")]
    NotRegular,

    #[error("element is not a non-zero idempotent (residual {residual:e})")]
    NotIdempotent { residual: f64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
