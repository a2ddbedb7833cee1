use std::fmt;
use std::path::Path;

use marathon_core::alignment::AlignmentError;
use marathon_core::ingest::IngestError;
use marathon_core::sampling::SamplingError;
use marathon_core::ModelError;
use marathon_service::{ServiceError, StoreError};

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or bad input content. Exit code 1.
    Validation(String),
    /// A file or socket could not be used. Exit code 2.
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl fmt::Display) -> Self {
        Self::Validation(msg.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Io(_) => 2,
        }
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) | Self::Io(m) => f.write_str(m),
        }
    }
}

fn from_csv(e: csv::Error) -> CliError {
    if e.is_io_error() {
        CliError::Io(e.to_string())
    } else {
        CliError::Validation(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => Self::Io(e.to_string()),
            IngestError::Csv(c) => from_csv(c),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::Io { .. } => Self::Io(e.to_string()),
            SamplingError::Csv(c) => from_csv(c),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<AlignmentError> for CliError {
    fn from(e: AlignmentError) -> Self {
        match e {
            AlignmentError::Io { .. } => Self::Io(e.to_string()),
            AlignmentError::Csv(c) => from_csv(c),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Config(_) | ServiceError::Store(StoreError::Load { .. }) => {
                Self::Validation(e.to_string())
            }
            _ => Self::Io(e.to_string()),
        }
    }
}
