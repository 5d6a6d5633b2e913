use std::io;
use std::path::PathBuf;

use ordanova::decide::DecideError;
use ordanova::montecarlo::McError;
use ordanova::IngestError;
use thiserror::Error;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Ingest(#[from] IngestError),
    #[error("{0}")]
    Input(String),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. } | Self::Ingest(_) | Self::Input(_) => EXIT_INPUT,
            Self::Write { .. } | Self::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<DecideError> for CliError {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::Alpha(_) | DecideError::TooFewReps(_) | DecideError::NotBinary(_) => {
                Self::Input(e.to_string())
            }
            other => Self::Internal(other.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Config(_) | McError::Alpha(_) => Self::Input(e.to_string()),
            other => Self::Internal(other.to_string()),
        }
    }
}
