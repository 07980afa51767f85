use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flag or configuration file; `origin` names the flag or the
    /// file (with line) that could not be read.
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    /// Well-formed input describing an impossible run; every violation found
    /// is listed.
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Simulation(#[from] rydlens::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Machine-readable category printed on failure.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse-error",
            CliError::Validation(_) => "validation-error",
            CliError::Io { .. } => "io-error",
            CliError::Simulation(rydlens::Error::Parse(_)) => "parse-error",
            CliError::Simulation(e) => e.category(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "parse-error" => 2,
            "validation-error" | "invalid-parameter" => 3,
            "unknown-preset" => 4,
            "io-error" => 5,
            _ => 6,
        }
    }
}
