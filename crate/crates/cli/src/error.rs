use std::path::PathBuf;

use serde_json::json;

/// Failures of a CLI run, each mapped to an exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{key}: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Numerical(#[from] horoflow::Error),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { key: key.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Verification(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Config { .. } => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Verification(_) => "verification",
            CliError::Io { .. } => "io",
        };
        let mut body = json!({ "kind": kind, "message": self.to_string() });
        if let CliError::Config { key, .. } = self {
            body["key"] = json!(key);
        }
        json!({ "error": body })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
