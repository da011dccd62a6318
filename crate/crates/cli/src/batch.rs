//! Many Hamiltonian files analyzed in parallel, reported in input order.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{AnalysisConfig, InputSource};
use crate::error::CliError;
use crate::report::{run_analyze, AnalysisReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchOutcome {
    Report(Box<AnalysisReport>),
    Error(CliError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub path: PathBuf,
    #[serde(flatten)]
    pub outcome: BatchOutcome,
}

impl BatchEntry {
    pub fn report(&self) -> Option<&AnalysisReport> {
        match &self.outcome {
            BatchOutcome::Report(r) => Some(r),
            BatchOutcome::Error(_) => None,
        }
    }

    pub fn error(&self) -> Option<&CliError> {
        match &self.outcome {
            BatchOutcome::Report(_) => None,
            BatchOutcome::Error(e) => Some(e),
        }
    }
}

/// Runs [`run_analyze`] on every path with the settings of `base` (its input
/// is replaced). A failing file produces an error entry; the others still
/// run. `threads = None` lets rayon pick.
pub fn run_batch(
    paths: &[PathBuf],
    base: &AnalysisConfig,
    threads: Option<usize>,
) -> Result<Vec<BatchEntry>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::parse("--jobs must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::other(e.to_string()))?;
    let entries = pool.install(|| {
        paths
            .par_iter()
            .map(|path| {
                let cfg = AnalysisConfig {
                    input: InputSource::File(path.clone()),
                    ..base.clone()
                };
                let outcome = match run_analyze(&cfg) {
                    Ok(r) => BatchOutcome::Report(Box::new(r)),
                    Err(e) => BatchOutcome::Error(e),
                };
                BatchEntry {
                    path: path.clone(),
                    outcome,
                }
            })
            .collect()
    });
    Ok(entries)
}

/// Exit status for a whole batch: 0 when every file succeeded, otherwise the
/// code of the first failure in input order.
pub fn batch_exit_code(entries: &[BatchEntry]) -> i32 {
    entries
        .iter()
        .find_map(|e| e.error().map(CliError::exit_code))
        .unwrap_or(0)
}
