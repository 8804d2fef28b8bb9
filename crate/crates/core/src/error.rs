use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = PccError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PccError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A value outside its admissible domain coming from data (e.g. a label
    /// outside `1..=n_c`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A hyperparameter or option outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    Convergence { index: usize, iterations: usize },

    #[error("format error in {source_name} at {location}: {message}")]
    Format {
        source_name: String,
        location: String,
        message: String,
    },

    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PccError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PccError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(
        source_name: impl Into<String>,
        location: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        PccError::Format {
            source_name: source_name.into(),
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line tool.
    ///
    /// 1 = usage, 2 = data/format, 3 = numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PccError::InvalidParameter(_) => 1,
            PccError::Convergence { .. } => 3,
            _ => 2,
        }
    }
}
