use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pthamil_cli::batch::{batch_exit_code, run_batch, BatchOutcome};
use pthamil_cli::commands::{
    render_evolve, render_fock_demo, render_two_level, run_evolve, run_fock_demo, run_two_level, write_fock_csv,
};
use pthamil_cli::config::{
    parse_vector, AnalysisConfig, BuiltinModel, InputSource, OperatorSpec, OutputFormat, DEFAULT_DRIFT_TOL,
    DEFAULT_IDENTITY_TOL, TOL_ENV,
};
use pthamil_cli::render::{render_csv, render_text};
use pthamil_cli::{run_analyze, CliError};
use pthamil_core::DEFAULT_TOL;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "pthamil",
    version,
    about = "Spectra, metrics and C operators of non-Hermitian matrix Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of one Hamiltonian.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Analyze many Hamiltonian files in parallel; output keeps input order.
    Batch {
        #[arg(required = false)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Worker threads (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Closed forms of H = [[0, α+β], [α−β, 0]] checked against the numerics.
    TwoLevel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Fock-basis expansion of a position eigenstate and its divergent norm.
    FockDemo {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 1000)]
        nmax: usize,
        /// Also write the full coefficient table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Time-evolve a state and track its Dirac and metric norms.
    Evolve {
        #[command(flatten)]
        input: InputArgs,
        /// Initial state as comma-separated complex numbers (default e_0).
        #[arg(long, allow_hyphen_values = true)]
        state: Option<String>,
        #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0,0.5,1.7,4.3"
        )]
        times: Vec<f64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    TwoLevel,
    FockX,
}

#[derive(Args)]
struct InputArgs {
    /// Hamiltonian as a JSON or CSV matrix.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 5)]
    dim: usize,
}

impl InputArgs {
    fn source(&self) -> InputSource {
        match (&self.file, self.model) {
            (Some(path), _) => InputSource::File(path.clone()),
            (None, Some(ModelName::TwoLevel)) | (None, None) => InputSource::Builtin(BuiltinModel::TwoLevel {
                alpha: self.alpha,
                beta: self.beta,
            }),
            (None, Some(ModelName::FockX)) => InputSource::Builtin(BuiltinModel::FockX { dim: self.dim }),
        }
    }
}

#[derive(Args)]
struct AnalysisArgs {
    /// Parity operator: identity, sigma1, sigma2, sigma3 or a matrix file.
    #[arg(long)]
    p: Option<String>,
    /// Linear part U of the PT operator v ↦ U conj(v): a name or a matrix file.
    #[arg(long)]
    pt: Option<String>,
    /// ±1 per real level, then per conjugate pair, e.g. "1,-1".
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    c_signs: Option<Vec<f64>>,
    /// Eigensolver tolerance; exceptional point when cond(R) > 1/tol.
    #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Threshold for the operator identities in the report.
    #[arg(long, default_value_t = DEFAULT_IDENTITY_TOL)]
    identity_tol: f64,
    /// Largest relative drift of the metric Gram matrix under evolution.
    #[arg(long, default_value_t = DEFAULT_DRIFT_TOL)]
    drift_tol: f64,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "0,0.5,1.7,4.3"
    )]
    times: Vec<f64>,
}

impl AnalysisArgs {
    fn config(&self, input: InputSource, format: OutputFormat) -> AnalysisConfig {
        AnalysisConfig {
            parity: self.p.as_deref().map(OperatorSpec::parse),
            pt: self.pt.as_deref().map(OperatorSpec::parse),
            c_signs: self.c_signs.clone(),
            tol: self.tol,
            identity_tol: self.identity_tol,
            drift_tol: self.drift_tol,
            times: self.times.clone(),
            format,
            ..AnalysisConfig::new(input)
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn unsupported(format: OutputFormat, what: &str) -> CliError {
    CliError::parse(format!(
        "{what} does not support --format {}",
        format!("{format:?}").to_lowercase()
    ))
}

/// Runs a subcommand and returns its output together with the exit code.
fn run(command: Command) -> Result<(String, i32), CliError> {
    match command {
        Command::Analyze {
            input,
            analysis,
            format,
        } => {
            let report = run_analyze(&analysis.config(input.source(), format))?;
            let out = match format {
                OutputFormat::Text => render_text(&report),
                OutputFormat::Json => report.to_json() + "\n",
                OutputFormat::Csv => render_csv(&report),
            };
            Ok((out, 0))
        }
        Command::Batch {
            files,
            analysis,
            jobs,
            format,
        } => {
            let base = analysis.config(InputSource::File(PathBuf::new()), format);
            base.validate()?;
            let entries = run_batch(&files, &base, jobs)?;
            let out = match format {
                OutputFormat::Json => json(&entries),
                OutputFormat::Text => {
                    let mut out = String::new();
                    for e in &entries {
                        out.push_str(&format!("=== {}\n", e.path.display()));
                        match &e.outcome {
                            BatchOutcome::Report(r) => out.push_str(&render_text(r)),
                            BatchOutcome::Error(err) => out.push_str(&format!("error: {err}\n")),
                        }
                    }
                    out
                }
                OutputFormat::Csv => return Err(unsupported(format, "batch")),
            };
            Ok((out, batch_exit_code(&entries)))
        }
        Command::TwoLevel {
            alpha,
            beta,
            tol,
            format,
        } => {
            let report = run_two_level(alpha, beta, tol)?;
            let code = if report.passed { 0 } else { 1 };
            let out = match format {
                OutputFormat::Text => render_two_level(&report),
                OutputFormat::Json => json(&report),
                OutputFormat::Csv => return Err(unsupported(format, "two-level")),
            };
            Ok((out, code))
        }
        Command::FockDemo { x, nmax, csv, format } => {
            let report = run_fock_demo(x, nmax)?;
            if let Some(path) = &csv {
                write_fock_csv(&report, path)?;
            }
            let out = match format {
                OutputFormat::Text => render_fock_demo(&report),
                OutputFormat::Json => json(&report),
                OutputFormat::Csv => return Err(unsupported(format, "fock-demo (use --csv PATH)")),
            };
            Ok((out, 0))
        }
        Command::Evolve {
            input,
            state,
            tol,
            times,
            format,
        } => {
            let cfg = AnalysisConfig {
                tol,
                times,
                ..AnalysisConfig::new(input.source())
            };
            let state = state.as_deref().map(parse_vector).transpose()?;
            let report = run_evolve(&cfg, state)?;
            let out = match format {
                OutputFormat::Text => render_evolve(&report),
                OutputFormat::Json => json(&report),
                OutputFormat::Csv => return Err(unsupported(format, "evolve")),
            };
            Ok((out, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
