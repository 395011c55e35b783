//! Shared pieces of the `relaxproj` command-line tool.
//!
//! The binary in `main.rs` stays a thin dispatcher; instance parsing, trace
//! serialization, and figure rendering live here so tests can drive them
//! without spawning processes.

use std::fmt;

pub mod figure;
pub mod instance;
pub mod output;

/// Exit discipline: 2 for anything wrong with inputs or configuration, 3 for
/// numerical anomalies (non-finite values in data or iterates), 4 when a
/// lattice guard refuses an exponential enumeration.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Anomaly(String),
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Anomaly(_) => 3,
            CliError::Guard(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Anomaly(msg) | CliError::Guard(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<relaxproj::Error> for CliError {
    fn from(e: relaxproj::Error) -> Self {
        match e {
            relaxproj::Error::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            relaxproj::Error::NonFinite(_) => CliError::Anomaly(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
