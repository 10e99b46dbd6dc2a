//! Error taxonomy mapped to process exit codes: configuration problems
//! (2) are the user's to fix, numerical failures (3) mean a structurally
//! valid run broke down (indefinite mass matrix, singular integrand,
//! non-finite output), check failures (4) mean the built-in result
//! verification found a regression, and I/O errors (1) are environmental.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::ChecksFailed(_) => 4,
        }
    }

    /// Wraps any library error as a numerical failure.
    pub fn numerical(e: impl fmt::Display) -> CliError {
        CliError::Numerical(e.to_string())
    }

    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn io(context: &str, e: impl fmt::Display) -> CliError {
        CliError::Io(format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}
