use std::path::PathBuf;

/// Top-level failure, grouped into the categories reported on exit.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numeric(#[from] sectorcap_core::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn category(&self) -> &'static str {
        match self {
            AppError::Config { .. } => "config",
            AppError::Validation { .. } => "validation",
            AppError::Io { .. } | AppError::Csv(_) => "io",
            AppError::Numeric(_) => "numeric",
        }
    }

    /// Process exit code. 2 is left to the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config { .. } => 3,
            AppError::Io { .. } | AppError::Csv(_) => 4,
            AppError::Numeric(_) => 5,
            AppError::Validation { .. } => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        AppError::Validation { field: field.into(), reason: reason.into() }
    }
}

pub type AppResult<T> = Result<T, AppError>;
