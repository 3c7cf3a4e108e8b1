use std::path::PathBuf;

use gardner_espline::GardnerError;
use thiserror::Error;

use crate::config::ConfigError;

/// Top-level failure of a CLI invocation, carrying its process exit code:
/// usage, configuration, and I/O problems exit with `1`, a numerical
/// breakdown during a solve with `2`.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Usage(String),

    #[error("cannot {action} {}: {source}", path.display())]
    Io {
        action: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Solver(GardnerError),

    #[error("numerical breakdown at step {step}")]
    Breakdown { step: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Breakdown { .. } => 2,
            _ => 1,
        }
    }
}

impl From<GardnerError> for CliError {
    fn from(e: GardnerError) -> Self {
        match e {
            GardnerError::NumericalBreakdown { step, .. } => CliError::Breakdown { step },
            other => CliError::Solver(other),
        }
    }
}
