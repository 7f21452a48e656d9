use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot read config file {path}: {source}")]
    ConfigFile {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Numerical(#[from] susyosc::Error),

    /// A verification run completed but a residual exceeded its threshold.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::ConfigFile { .. } | Self::Output { .. } => 2,
            Self::Numerical(_) | Self::CheckFailed(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            _ => "numerical",
        }
    }

    /// One-line JSON body for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
