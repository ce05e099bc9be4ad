use std::path::PathBuf;

use thiserror::Error;

/// Exit status for bad flags, incompatible inputs and infeasible settings.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for I/O failures, unreadable files and numerical breakdowns.
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fpdc_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use fpdc_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(
                E::InvalidParameter(_)
                | E::RankOutOfRange { .. }
                | E::TooFewPoints { .. }
                | E::Unsupported(_)
                | E::DimensionMismatch(_),
            ) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
