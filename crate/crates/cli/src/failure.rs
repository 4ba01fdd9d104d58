use std::fmt;
use std::process::ExitCode;

use haarforge_core::error::{Error, OracleError};

/// Why a command stopped, mapped onto the documented exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not pass (exit 1).
    Check(String),
    /// Bad flags or configuration (exit 2).
    Usage(String),
    /// Reading or writing a file failed (exit 3).
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Check(_) => 1,
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Check(m) => write!(f, "check failed: {m}"),
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Format(_) => Self::Io(e.to_string()),
            Error::Stats(_) => Self::Check(e.to_string()),
            Error::Oracle(OracleError::IndexOutOfRange { .. }) => Self::Check(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<haarforge_core::error::ConfigError> for Failure {
    fn from(e: haarforge_core::error::ConfigError) -> Self {
        Self::Usage(e.to_string())
    }
}

pub fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}
