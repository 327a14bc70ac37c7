//! Driver for the tbdkit experiments: configuration, the subcommands and
//! deterministic JSON output.

pub mod config;
pub mod experiments;
pub mod json;

pub use config::ExperimentConfig;
pub use experiments::{run, Outcome, COMMANDS};

/// Bad flags, configs or parameters. Maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

impl From<tbdkit::Error> for UsageError {
    fn from(e: tbdkit::Error) -> Self {
        UsageError(e.to_string())
    }
}
