use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Library(#[from] latosc::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} verification check(s) failed")]
    Verify { failed: usize },
}

impl CliError {
    /// Process exit status: 1 verification failure, 2 usage, 3 numerical.
    pub fn exit_code(&self) -> u8 {
        use latosc::Error as E;
        match self {
            CliError::Verify { .. } => EXIT_VERIFY,
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Library(
                E::InvalidParameter(_) | E::NonLatticeAlpha { .. } | E::UnsupportedParticleNumber { .. },
            ) => EXIT_USAGE,
            CliError::Library(_) | CliError::Io { .. } => EXIT_NUMERICAL,
        }
    }
}
