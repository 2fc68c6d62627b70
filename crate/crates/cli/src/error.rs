use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] graphcode::Error),

    #[error("{path}: {message}")]
    Toml { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("missing {what} at {path}; run `graphcode {command}` first")]
    Missing {
        what: &'static str,
        path: PathBuf,
        command: &'static str,
    },

    #[error("{failed} of {total} tasks failed")]
    TaskFailures {
        failed: usize,
        total: usize,
        harness: bool,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        CliError::Json {
            context: context.into(),
            source,
        }
    }

    /// Process exit status: 2 for harness faults, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_harness_fault() => 2,
            CliError::TaskFailures { harness: true, .. } => 2,
            _ => 1,
        }
    }
}
