use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or invalid configuration; `location` is `file[:line]`.
    #[error("config error: {location}: {message}")]
    Config { location: String, message: String },

    #[error("solver aborted: {0}")]
    Solver(#[source] extinct_core::Error),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output failed: {0}")]
    Output(#[source] extinct_core::Error),

    #[error("{failed} of {total} sweep runs failed")]
    SweepFailures { failed: usize, total: usize, code: i32 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => 2,
            CliError::SweepFailures { code, .. } => *code,
            _ => 1,
        }
    }

    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}
