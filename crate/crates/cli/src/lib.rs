//! Batch verification driver for `gabor-frames`: versioned JSON configs,
//! named check suites and deterministic JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, SuiteConfig, SuiteName};
pub use report::{Entry, Metric, Report};
pub use suites::run_suite;

/// Process-level failure, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}
