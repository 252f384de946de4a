use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A record could not be decoded; `field` names the offending part.
    #[error("parse error in {source_name}: field `{field}`: {message}")]
    Parse {
        source_name: String,
        field: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("format error in {source_name}: {message}")]
    Format {
        source_name: String,
        message: String,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("summarizer timed out after {0:?}")]
    Timeout(std::time::Duration),

    #[error("instance {instance_id}: {source}")]
    Instance {
        instance_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(
        source_name: impl Into<String>,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn format(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error: 1 usage, 2 data/validation, 3 protocol.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Format { .. }
            | Error::Io { .. }
            | Error::Internal(_) => 2,
            Error::Protocol(_) | Error::Timeout(_) => 3,
            Error::Instance { source, .. } => source.exit_code(),
        }
    }
}
