//! Scenario files, runs and verification.
//!
//! Exit codes of every harness entry point: 0 success, 1 configuration,
//! usage, I/O or verification failure, 2 numerical divergence.

use std::path::PathBuf;

use thiserror::Error;

pub mod run;
pub mod scenario;
pub mod verify;

pub use run::{bounds_report, execute, run_scenario, MetricsRecord, RunOutput};
pub use scenario::{parse_scenario, render, template, ControllerKind, GainSource, Scenario, SignalKind};
pub use verify::{verify_suite, Level, VerifyOptions, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Diverged(crate::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } => EXIT_CONFIG,
            HarnessError::Diverged(_) => EXIT_DIVERGED,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

impl From<crate::Error> for HarnessError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Diverged { .. } => HarnessError::Diverged(e),
            other => HarnessError::Config(other.to_string()),
        }
    }
}
