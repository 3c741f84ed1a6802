//! Verification runner: reads a JSON run config, builds the family, its
//! normalization and the requested connections, runs the selected suites on a
//! worker pool and writes a JSON report plus a text summary.

pub mod cache;
pub mod config;
pub mod report;
pub mod runner;
pub mod suites;

pub use config::{Fault, InstanceConfig, RunConfig, Suite, WordConfig};
pub use report::{CheckRecord, Expect, Report};
pub use runner::{run, Options};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}
