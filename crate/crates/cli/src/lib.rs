//! Configuration-driven runner for the simulation and verification pipelines.

pub mod commands;
pub mod config;
pub mod manifest;

use std::path::PathBuf;

pub use commands::{parse_threads, run, Command, Invocation, Outcome};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] levyrd_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("gate {theorem} failed: {}", clauses.join("; "))]
    GateFailed {
        theorem: String,
        clauses: Vec<String>,
        manifest: PathBuf,
    },

    #[error("{completed} of {requested} replicas completed: {cause}")]
    Partial {
        completed: usize,
        requested: usize,
        cause: String,
        manifest: PathBuf,
    },
}

impl CliError {
    /// 1 for invalid input, 2 for a failed gate, 3 for incomplete Monte Carlo.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::GateFailed { .. } => 2,
            CliError::Partial { .. } | CliError::Core(levyrd_core::Error::PartialResults { .. }) => 3,
            _ => 1,
        }
    }
}
