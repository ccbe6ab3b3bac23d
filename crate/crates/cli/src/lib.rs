//! The harness behind the `charlab` binary.
//!
//! Every subcommand is a function here so that the acceptance tests can
//! drive the same code paths as the binary.

pub mod cache;
pub mod caps;
pub mod config;
pub mod explore;
pub mod families;
pub mod format;
pub mod scan;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

/// Exit code when every check passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when at least one check fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for bad flags, bad config files and missing or tampered caps.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("caps error: {0}")]
    Caps(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Lib(#[from] charlab::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
