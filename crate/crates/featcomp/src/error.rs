use std::io;

use thiserror::Error;

use crate::config::ConfigError;
use crate::libsvm::LoadError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Core(#[from] featcomp_core::Error),
}

impl HarnessError {
    /// 1 for configuration and numerical problems, 2 for file problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(_) => 1,
            HarnessError::Load(_) | HarnessError::Write { .. } => 2,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
