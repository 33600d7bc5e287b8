use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{0}")]
    Numerical(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 1 usage, 2 validation, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Io { .. } => 1,
            Self::Parse { .. } | Self::Validation(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<spinbridge::Error> for CliError {
    fn from(e: spinbridge::Error) -> Self {
        match e {
            spinbridge::Error::Numerical(_) | spinbridge::Error::NonHermitian { .. } => Self::Numerical(e.to_string()),
            other => Self::Validation(other.to_string()),
        }
    }
}
