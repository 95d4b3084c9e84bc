use nbw_core::{FormatError, GeneratorError, GnnError, OracleError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Gnn(#[from] GnnError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    /// 0 success, 1 validation error, 2 starved bucket, 3 runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Generator(GeneratorError::Starved { .. }) => 2,
            HarnessError::Validation(_)
            | HarnessError::Generator(_)
            | HarnessError::Gnn(_)
            | HarnessError::Oracle(_) => 1,
            HarnessError::Format(FormatError::Io(_)) => 3,
            HarnessError::Format(_) => 1,
            HarnessError::Io(_) | HarnessError::Runtime(_) => 3,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
