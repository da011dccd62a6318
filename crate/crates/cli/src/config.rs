//! What to analyze and how.

use std::path::{Path, PathBuf};

use pthamil_core::antilinear::AntilinearOp;
use pthamil_core::fockdemo::position_truncation;
use pthamil_core::linalg::pauli;
use pthamil_core::twolevel::{standard_pt, TwoLevelModel};
use pthamil_core::{ComplexMatrix, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable that overrides the default tolerance.
pub const TOL_ENV: &str = "PTHAMIL_TOL";

pub const DEFAULT_TIMES: [f64; 4] = [0.0, 0.5, 1.7, 4.3];

/// Largest relative drift of the V Gram matrix accepted under time evolution.
pub const DEFAULT_DRIFT_TOL: f64 = 1e-8;

/// Threshold for the operator identities checked in a report (intertwining,
/// commutators, orthogonality).
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum BuiltinModel {
    /// `[[0, α+β], [α−β, 0]]`.
    TwoLevel { alpha: f64, beta: f64 },
    /// `a + a†` truncated to `dim` Fock states.
    FockX { dim: usize },
}

impl BuiltinModel {
    pub fn hamiltonian(&self) -> Result<ComplexMatrix, CliError> {
        match *self {
            BuiltinModel::TwoLevel { alpha, beta } => Ok(TwoLevelModel::new(alpha, beta)?.hamiltonian()),
            BuiltinModel::FockX { dim } if dim >= 1 => Ok(position_truncation(dim)),
            BuiltinModel::FockX { .. } => Err(CliError::parse("fock-x needs --dim ≥ 1")),
        }
    }

    /// The model's own PT operator.
    pub fn pt(&self) -> AntilinearOp {
        match *self {
            BuiltinModel::TwoLevel { .. } => standard_pt(),
            BuiltinModel::FockX { dim } => AntilinearOp::complex_conjugation(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source", content = "value")]
pub enum InputSource {
    File(PathBuf),
    Builtin(BuiltinModel),
}

/// A matrix given by name (`identity`, `sigma1`, `sigma2`, `sigma3`) or by
/// a JSON/CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source", content = "value")]
pub enum OperatorSpec {
    Named(String),
    File(PathBuf),
}

impl OperatorSpec {
    /// A bare word that names a known operator is taken as a name, anything
    /// else as a path.
    pub fn parse(s: &str) -> Self {
        match s {
            "identity" | "sigma1" | "sigma2" | "sigma3" | "k" => OperatorSpec::Named(s.to_string()),
            _ => OperatorSpec::File(PathBuf::from(s)),
        }
    }

    pub fn load(&self, dim: usize) -> Result<ComplexMatrix, CliError> {
        let m = match self {
            OperatorSpec::Named(name) => match name.as_str() {
                "identity" | "k" => ComplexMatrix::identity(dim),
                "sigma1" => pauli::sigma1(),
                "sigma2" => pauli::sigma2(),
                "sigma3" => pauli::sigma3(),
                other => return Err(CliError::parse(format!("unknown operator name {other:?}"))),
            },
            OperatorSpec::File(path) => load_matrix(path)?,
        };
        if m.dim() != dim {
            return Err(CliError::parse(format!(
                "operator {} is {}×{}, Hamiltonian is {dim}×{dim}",
                self.label(),
                m.dim(),
                m.dim()
            )));
        }
        Ok(m)
    }

    pub fn label(&self) -> String {
        match self {
            OperatorSpec::Named(n) => n.clone(),
            OperatorSpec::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: InputSource,
    /// Parity operator for the P, PV and C sections.
    pub parity: Option<OperatorSpec>,
    /// Linear part `U` of the PT operator `v ↦ U conj(v)`. Defaults to the
    /// builtin model's own PT, or to `P·K` (plain conjugation when no parity
    /// is given) for file input.
    pub pt: Option<OperatorSpec>,
    /// `±1` weights for the C operator, one per real level then one per
    /// conjugate pair.
    pub c_signs: Option<Vec<f64>>,
    /// Eigensolver and classification tolerance; eigenvector matrices with
    /// condition number above `1/tol` are treated as exceptional points.
    pub tol: f64,
    pub identity_tol: f64,
    pub drift_tol: f64,
    pub times: Vec<f64>,
    pub format: OutputFormat,
}

impl AnalysisConfig {
    pub fn new(input: InputSource) -> Self {
        Self {
            input,
            parity: None,
            pt: None,
            c_signs: None,
            tol: DEFAULT_TOL,
            identity_tol: DEFAULT_IDENTITY_TOL,
            drift_tol: DEFAULT_DRIFT_TOL,
            times: DEFAULT_TIMES.to_vec(),
            format: OutputFormat::Text,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::parse(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.identity_tol > 0.0 && self.identity_tol.is_finite()) {
            return Err(CliError::parse(format!(
                "identity tolerance must be positive, got {}",
                self.identity_tol
            )));
        }
        if !(self.drift_tol > 0.0 && self.drift_tol.is_finite()) {
            return Err(CliError::parse(format!(
                "drift tolerance must be positive, got {}",
                self.drift_tol
            )));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(CliError::parse("evolution times must be finite"));
        }
        if let Some(signs) = &self.c_signs {
            if signs.iter().any(|s| s.abs() != 1.0) {
                return Err(CliError::parse("C signs must be +1 or -1"));
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<ComplexMatrix, CliError> {
        match &self.input {
            InputSource::File(path) => load_matrix(path),
            InputSource::Builtin(model) => model.hamiltonian(),
        }
    }

    /// The PT operator used for intrinsic phases, the symmetry residual and
    /// the `[C, PT]` diagnostic.
    pub fn pt_operator(&self, dim: usize) -> Result<AntilinearOp, CliError> {
        if let Some(op) = &self.pt {
            return Ok(AntilinearOp::antilinear(op.load(dim)?));
        }
        if let InputSource::Builtin(model) = &self.input {
            return Ok(model.pt());
        }
        let p = match &self.parity {
            Some(op) => op.load(dim)?,
            None => ComplexMatrix::identity(dim),
        };
        Ok(AntilinearOp::antilinear(p))
    }
}

/// Reads a matrix from JSON (`.json`) or CSV (anything else that parses as
/// CSV; JSON is tried first for unknown extensions).
pub fn load_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    parse_matrix_text(&text, path.extension().and_then(|e| e.to_str())).map_err(|e| match e {
        CliError::Parse { message } => CliError::parse(format!("{}: {message}", path.display())),
        other => other,
    })
}

pub fn parse_matrix_text(text: &str, extension: Option<&str>) -> Result<ComplexMatrix, CliError> {
    let parsed = match extension.map(str::to_ascii_lowercase).as_deref() {
        Some("json") => ComplexMatrix::from_json_str(text),
        Some("csv") => ComplexMatrix::from_csv_str(text),
        _ => ComplexMatrix::from_json_str(text).or_else(|_| ComplexMatrix::from_csv_str(text)),
    };
    parsed.map_err(|e| match e {
        pthamil_core::Error::Parse(message) => CliError::Parse { message },
        other => CliError::parse(other.to_string()),
    })
}

/// Parses `"1, -0.5i, 2+i"` into a vector.
pub fn parse_vector(s: &str) -> Result<Vec<pthamil_core::C64>, CliError> {
    s.split(',')
        .map(|cell| pthamil_core::linalg::parse_complex(cell).map_err(CliError::parse))
        .collect()
}

/// Tolerance from `PTHAMIL_TOL` if set, otherwise the library default.
pub fn tolerance_from_env() -> Result<f64, CliError> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| CliError::parse(format!("{TOL_ENV}={v:?} is not a positive number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pthamil_core::c64;

    #[test]
    fn operator_names() {
        assert_eq!(OperatorSpec::parse("sigma1"), OperatorSpec::Named("sigma1".into()));
        assert_eq!(OperatorSpec::parse("p.json"), OperatorSpec::File("p.json".into()));
        assert!(OperatorSpec::parse("sigma1").load(3).is_err());
        assert_eq!(
            OperatorSpec::parse("identity").load(3).unwrap(),
            ComplexMatrix::identity(3)
        );
    }

    #[test]
    fn builtin_pt_is_a_symmetry() {
        let model = BuiltinModel::TwoLevel { alpha: 5.0, beta: 3.0 };
        let h = model.hamiltonian().unwrap();
        assert!(pthamil_core::spectra::antilinear_symmetry_check(&h, &model.pt(), 1e-12));
        assert_eq!(model.pt().u, ComplexMatrix::identity(2).scale(c64(0.0, -1.0)));
    }

    #[test]
    fn config_validation() {
        let mut cfg = AnalysisConfig::new(InputSource::Builtin(BuiltinModel::FockX { dim: 3 }));
        assert!(cfg.validate().is_ok());
        cfg.tol = -1.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-10;
        cfg.c_signs = Some(vec![1.0, 0.0]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("1, -i").unwrap(), vec![c64(1.0, 0.0), c64(0.0, -1.0)]);
        assert!(parse_vector("1, x").is_err());
    }
}
