//! Configuration, file formats and the command-line driver around
//! `eisencong_core`.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 mathematical
//! mismatch, 4 inconclusive (a search cap or size limit was hit).

pub mod cli;
pub mod commands;
pub mod config;
pub mod qexp;
pub mod report;

use eisencong_core::error::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Undecided(_) | CoreError::LimitExceeded(_)) => EXIT_INCONCLUSIVE,
            _ => EXIT_CONFIG,
        }
    }
}

pub use cli::{run, Cli};
