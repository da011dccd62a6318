use pthamil_core::{Error as CoreError, C64};
use serde::{Deserialize, Serialize};

/// Failure of a whole analysis, with its process exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CliError {
    #[error("parse error: {message}")]
    Parse { message: String },
    #[error(
        "no antilinear symmetry: eigenvalue {index} = {} has no complex-conjugate partner",
        crate::render::complex(*value)
    )]
    NoAntilinearSymmetry { index: usize, value: C64 },
    #[error(
        "exceptional point: eigenvector condition number {condition:.3e} exceeds {threshold:.3e}; \
         the Hamiltonian is (numerically) a non-diagonalizable Jordan form and has no metric"
    )]
    ExceptionalPoint { condition: f64, threshold: f64 },
    #[error("{message}")]
    Other { message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::NoAntilinearSymmetry { .. } => 3,
            CliError::ExceptionalPoint { .. } => 4,
            CliError::Other { .. } => 1,
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError::Parse {
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        CliError::Other {
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(message) => CliError::Parse { message },
            CoreError::NotSquare { .. } | CoreError::NonFinite { .. } => CliError::parse(e.to_string()),
            CoreError::UnpairedComplexEigenvalue { index, value } => CliError::NoAntilinearSymmetry { index, value },
            CoreError::NonDiagonalizable { condition, threshold } => {
                CliError::ExceptionalPoint { condition, threshold }
            }
            other => CliError::other(other.to_string()),
        }
    }
}
