use thiserror::Error;

use crate::scenario::{ScenarioSource, ValidationError};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const ACCEPTANCE_FAILURE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const INTERNAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum RunError {
    /// Invalid input, reported against the scenario field at `path`.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("numerical error: {0}")]
    Numerical(nearfocus_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Core errors that stem from bad parameters are pinned to `section`;
    /// the rest are numerical failures.
    pub fn from_core(section: &str, e: nearfocus_core::Error) -> Self {
        use nearfocus_core::Error as E;
        match e {
            E::InvalidArray(_)
            | E::InvalidGrid(_)
            | E::InvalidParameter(_)
            | E::PointOnAperture { .. }
            | E::DuplicateFocalPoint { .. }
            | E::GridTooSmall { .. }
            | E::NotPlanar
            | E::IndivisibleTiling { .. }
            | E::ShapeMismatch(_) => Self::invalid(section, e.to_string()),
            E::LengthMismatch { .. } | E::NoCrossing { .. } | E::CalibrationDiverged { .. } => Self::Numerical(e),
        }
    }
}

/// Attaches a section name to core results.
pub trait CoreContext<T> {
    fn ctx(self, section: &str) -> Result<T, RunError>;
}

impl<T> CoreContext<T> for nearfocus_core::Result<T> {
    fn ctx(self, section: &str) -> Result<T, RunError> {
        self.map_err(|e| RunError::from_core(section, e))
    }
}

/// Top-level failure of a CLI invocation.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(#[from] ValidationError),
    #[error("{0}")]
    Internal(String),
    #[error("{0}")]
    Acceptance(String),
}

impl CliError {
    pub fn from_run(source: &ScenarioSource, e: RunError) -> Self {
        match e {
            RunError::Invalid { path, message } => Self::Validation(source.field_error(&path, &message)),
            other => Self::Internal(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => exit::VALIDATION,
            Self::Internal(_) => exit::INTERNAL,
            Self::Acceptance(_) => exit::ACCEPTANCE_FAILURE,
        }
    }
}
