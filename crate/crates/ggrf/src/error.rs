use std::path::PathBuf;

/// Errors surfaced by the command line, each mapping to an exit status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Stats(#[from] ggrf_core::Error),
    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: u64,
        #[source]
        source: ggrf_core::Error,
    },
    #[error("{0}")]
    Internal(String),
}

impl AppError {
    pub fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        AppError::Format { path: path.into(), line, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// 2 for input/usage problems, 3 for statistical degeneracy, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Io { .. } | AppError::Format { .. } | AppError::Usage(_) => 2,
            AppError::Stats(e) => {
                if e.is_degenerate() {
                    3
                } else {
                    2
                }
            }
            // Simulated data is never malformed input.
            AppError::Replicate { .. } | AppError::Internal(_) => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
