//! Reproducible experiments on the half-plane magnetic Schrödinger operator:
//! configuration, scenario runners, report emission and acceptance checks.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;

pub use config::{parse_config, ConfigError, RunConfig, Scenario};
pub use report::{emit_report, RunReport};
pub use scenarios::run_scenario;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config error at {0}")]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Numerical(String),

    #[error("cannot write report to {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid thread count: {0}")]
    Threads(String),
}

impl LabError {
    /// Process exit code: 2 for configuration problems, 3 for numerical and
    /// I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::ReadConfig { .. } | LabError::Config(_) | LabError::Threads(_) => 2,
            LabError::Numerical(_) | LabError::Write { .. } => 3,
        }
    }
}

/// Exit code for a completed run: 1 if a property check failed.
pub fn run_exit_code(rep: &RunReport) -> i32 {
    if rep.all_passed() {
        0
    } else {
        1
    }
}
