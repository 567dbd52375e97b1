use thiserror::Error;

#[derive(Debug, Error)]
pub enum QkaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("unsupported attack kind for this operation: {0}")]
    Unsupported(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

impl QkaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QkaError::InvalidArgument(msg.into())
    }

    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        QkaError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, QkaError>;
