use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {}: {source}", path.display())]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("missing mandatory column {column}")]
    MissingColumn { column: String },

    #[error("unknown interaction kind {0:?}")]
    UnknownInteractionKind(String),

    #[error("dataset exhausted: no interactions survive preprocessing")]
    DatasetExhausted,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt {what} at byte {offset}: {message}")]
    Corrupt { what: &'static str, offset: u64, message: String },

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("user {user} has no history: no basis for item-item recommendation")]
    EmptyHistory { user: usize },

    #[error("item {item} has no consumers to combine")]
    NoConsumers { item: usize },

    #[error("non-finite value during training (epoch {epoch}, user {user}, item {item}): {message}")]
    NonFinite { epoch: usize, user: usize, item: usize, message: String },

    #[error("negative sampling exceeded {0} rejections")]
    RejectionLimit(usize),

    #[error("no users with ground truth in the evaluation set")]
    NoQualifyingUsers,
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }

    /// Coarse category used by front-ends to pick an exit status.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Open { .. } | Error::InvalidConfig(_) => ErrorCategory::Usage,
            Error::NonFinite { .. } | Error::RejectionLimit(_) => ErrorCategory::Numeric,
            Error::Io(_)
            | Error::MalformedLine { .. }
            | Error::MissingColumn { .. }
            | Error::UnknownInteractionKind(_)
            | Error::DatasetExhausted
            | Error::Corrupt { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::EmptyHistory { .. }
            | Error::NoConsumers { .. }
            | Error::NoQualifyingUsers => ErrorCategory::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numeric,
}
