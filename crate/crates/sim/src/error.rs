use std::path::PathBuf;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    /// Malformed or inconsistent configuration; `path` is a JSON pointer.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] squint_core::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for everything
    /// that failed while running the models or writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Read { .. } => 2,
            Self::Model(_) | Self::Write { .. } => 3,
        }
    }
}
