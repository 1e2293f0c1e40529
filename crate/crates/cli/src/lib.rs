//! Command implementations behind the `gravlab` binary.

// Guards such as `!(x > 0.0)` are written that way to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod bot;
pub mod cmd;
pub mod serve;

use std::path::Path;

use gravlab_core::session::SessionConfig;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("deadlock: {0}")]
    Deadlock(String),
    #[error("{0} divergence(s) found")]
    Divergence(usize),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Deadlock(_) => 3,
            CliError::Divergence(_) => 4,
        }
    }
}

/// Reads a session config, or the defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<SessionConfig, CliError> {
    let Some(path) = path else {
        return Ok(SessionConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    SessionConfig::from_toml(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
