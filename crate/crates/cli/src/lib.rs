//! Command-line front end for pseudo-Hermitian Hamiltonian analysis: input
//! handling, the analysis pipeline and its report, batch processing and the
//! text/JSON/CSV renderers.

pub mod batch;
pub mod commands;
pub mod config;
pub mod error;
pub mod render;
pub mod report;

pub use batch::{run_batch, BatchEntry, BatchOutcome};
pub use config::{AnalysisConfig, BuiltinModel, InputSource, OperatorSpec, OutputFormat};
pub use error::CliError;
pub use report::{run_analyze, AnalysisReport};
