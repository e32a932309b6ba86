use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid document {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid document: {0}")]
    Document(String),
    #[error(transparent)]
    Core(#[from] effective_forms::Error),
    #[error("not equivalent: {0}")]
    NotEquivalent(String),
    #[error("no witness: {0}")]
    NoWitness(String),
}

impl CliError {
    /// 1: I/O, parse or invalid input; 2: not effective; 3: not equivalent or no witness.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(effective_forms::Error::NotEffective(_)) => 2,
            CliError::NotEquivalent(_) | CliError::NoWitness(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
