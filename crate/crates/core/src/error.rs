use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { dim: usize, row: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular (smallest/largest singular value = {ratio:e})")]
    Singular { ratio: f64 },

    #[error("matrix is not diagonalizable: eigenvector condition number {condition:e} exceeds {threshold:e} (exceptional point)")]
    NonDiagonalizable { condition: f64, threshold: f64 },

    #[error("QR iteration failed to converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("eigenvalue {value} (index {index}) has no complex-conjugate partner: no antilinear symmetry")]
    UnpairedComplexEigenvalue { index: usize, value: Complex64 },

    #[error("spectrum is not entirely real")]
    NotRealSpectrum,

    #[error("invalid P/T frame: {0}")]
    InvalidFrame(String),

    #[error("state is not a PT eigenstate (residual {residual:e})")]
    NotPTEigenstate { residual: f64 },

    #[error("operator does not intertwine H with its adjoint (residual {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("two-level model is not in its real phase (alpha = {alpha}, beta = {beta})")]
    NotRealPhase { alpha: f64, beta: f64 },

    #[error("coefficient overflow at n = {n}")]
    Overflow { n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}
