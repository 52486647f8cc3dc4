use std::path::Path;

use sweepopt::Error;
use thiserror::Error as ThisError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}:{line}:{column}: parse error: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },

    #[error("invalid scene: {0}")]
    Validation(String),

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error(transparent)]
    Planner(#[from] Error),

    #[error("{0} verification check(s) failed")]
    ChecksFailed(usize),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Parse { .. } | Self::Validation(_) | Self::Usage(_) => EXIT_INPUT,
            Self::Planner(e) => match e {
                Error::BlockedEndpoint { .. } | Error::SliceInfeasible { .. } | Error::PlacementFailed { .. } => {
                    EXIT_INFEASIBLE
                }
                Error::InvalidScene(_) | Error::InvalidWeight(_) | Error::InvalidPolygon(_) | Error::InvalidObstacle(_) => {
                    EXIT_INPUT
                }
                _ => EXIT_FAILURE,
            },
            Self::ChecksFailed(_) => EXIT_FAILURE,
        }
    }

    /// Short machine-readable tag for JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Parse { .. } => "parse",
            Self::Validation(_) => "validation",
            Self::Usage(_) => "usage",
            Self::Planner(Error::BlockedEndpoint { .. }) => "blocked_endpoint",
            Self::Planner(Error::SliceInfeasible { .. }) => "slice_infeasible",
            Self::Planner(Error::PlacementFailed { .. }) => "placement_failed",
            Self::Planner(_) => "planner",
            Self::ChecksFailed(_) => "checks_failed",
        }
    }
}
