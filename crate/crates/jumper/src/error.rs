use std::path::PathBuf;

/// Errors from reading or writing files.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, msg: impl ToString) -> Self {
        IoError::Format {
            path: path.into(),
            line,
            msg: msg.to_string(),
        }
    }

    pub(crate) fn invalid(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        IoError::Invalid {
            path: path.into(),
            msg: msg.to_string(),
        }
    }
}

pub type IoResult<T> = Result<T, IoError>;
