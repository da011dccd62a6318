//! Reports for the `two-level`, `fock-demo` and `evolve` subcommands.

use std::fmt::Write as _;
use std::path::Path;

use pthamil_core::fockdemo::{divergence_witness, oscillator_contrast, DivergenceWitness, OscillatorContrast};
use pthamil_core::intertwiner::build_metric;
use pthamil_core::linalg::{eigendecompose, sandwich, vec_norm};
use pthamil_core::spectra::classify;
use pthamil_core::twolevel::{
    closed_forms, compare_with_pipeline, ClosedForms, Phase, PipelineComparison, TwoLevelModel,
};
use pthamil_core::{c64, C64};
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::error::CliError;
use crate::render::{complex, matrix, number, residual};
use crate::report::Section;

/// Agreement required between the closed forms and the numerical pipeline.
pub const CLOSED_FORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelReport {
    pub alpha: f64,
    pub beta: f64,
    pub phase: Phase,
    pub eigenvalues: Vec<C64>,
    pub closed_forms: Section<ClosedForms>,
    pub comparison: Section<PipelineComparison>,
    pub passed: bool,
}

pub fn run_two_level(alpha: f64, beta: f64, tol: f64) -> Result<TwoLevelReport, CliError> {
    let model = TwoLevelModel::new(alpha, beta)?;
    let phase = model.phase();
    if phase == Phase::Exceptional {
        // let the eigensolver report the condition number it sees
        eigendecompose(&model.hamiltonian(), tol)?;
        return Err(CliError::ExceptionalPoint {
            condition: f64::INFINITY,
            threshold: 1.0 / tol,
        });
    }
    let eigenvalues = eigendecompose(&model.hamiltonian(), tol)?.values;
    let (forms, comparison) = match phase {
        Phase::RealSpectrum => (
            Section::Done(closed_forms(&model)?),
            Section::Done(compare_with_pipeline(&model, tol)?),
        ),
        _ => {
            let reason = "β > α: eigenvalues ±i√(β² − α²) are complex, so no metric diagonalizes H".to_string();
            (Section::skipped(reason.clone()), Section::skipped(reason))
        }
    };
    let passed = comparison.done().is_none_or(|c| c.max_error <= CLOSED_FORM_TOL);
    Ok(TwoLevelReport {
        alpha,
        beta,
        phase,
        eigenvalues,
        closed_forms: forms,
        comparison,
        passed,
    })
}

pub fn render_two_level(r: &TwoLevelReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "H = [[0, α+β], [α−β, 0]] with α = {}, β = {}",
        number(r.alpha),
        number(r.beta)
    );
    let _ = writeln!(out, "phase: {:?}", r.phase);
    let e: Vec<String> = r.eigenvalues.iter().map(|&z| complex(z)).collect();
    let _ = writeln!(out, "eigenvalues: {}", e.join(", "));
    match &r.closed_forms {
        Section::Skipped { skipped } => {
            let _ = writeln!(out, "closed forms skipped: {skipped}");
        }
        Section::Done(cf) => {
            let _ = writeln!(out, "\ntanh 2θ = β/α, θ = {}", number(cf.theta));
            let _ = writeln!(
                out,
                "cosh 2θ = {}, sinh 2θ = {}",
                number(cf.cosh_2theta),
                number(cf.sinh_2theta)
            );
            let _ = writeln!(out, "S = exp(−θσ3):");
            out.push_str(&matrix(&cf.s, "  "));
            let _ = writeln!(out, "S H S⁻¹:");
            out.push_str(&matrix(&cf.hermitian_form, "  "));
            let _ = writeln!(out, "V = cosh 2θ − σ3 sinh 2θ:");
            out.push_str(&matrix(&cf.v, "  "));
            let _ = writeln!(out, "V⁻¹:");
            out.push_str(&matrix(&cf.v_inv, "  "));
            let _ = writeln!(out, "N± = {}", number(cf.normalization));
            let _ = writeln!(
                out,
                "u₊ = ({}, {}), E₊ = {}",
                number(cf.u_plus[0]),
                number(cf.u_plus[1]),
                number(cf.energies[0])
            );
            let _ = writeln!(
                out,
                "u₋ = ({}, {}), E₋ = {}",
                number(cf.u_minus[0]),
                number(cf.u_minus[1]),
                number(cf.energies[1])
            );
            let _ = writeln!(out, "u₋†u₊ = {}", number(cf.dirac_overlap));
            let _ = writeln!(
                out,
                "u±†σ1u± = {}, {}",
                number(cf.parity_norms[0]),
                number(cf.parity_norms[1])
            );
            let _ = writeln!(out, "PV = σ1 V:");
            out.push_str(&matrix(&cf.pv, "  "));
        }
    }
    if let Section::Done(c) = &r.comparison {
        let _ = writeln!(
            out,
            "\nlargest deviation of the numerical pipeline from the closed forms"
        );
        for (label, x) in [
            ("energies", c.energies),
            ("u₊", c.u_plus),
            ("u₋", c.u_minus),
            ("V", c.v),
            ("u₋†u₊", c.dirac_overlap),
            ("V Gram", c.v_gram),
            ("P norms", c.parity_norms),
            ("PV", c.pv),
        ] {
            let _ = writeln!(out, "  {label:<8} {}", residual(x));
        }
        let _ = writeln!(
            out,
            "{} (max {} against {})",
            if r.passed { "ok" } else { "FAILED" },
            residual(c.max_error),
            residual(CLOSED_FORM_TOL)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockRow {
    pub n: usize,
    pub coefficient: f64,
    pub squared: f64,
    pub partial_norm: f64,
    pub harmonic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDemoReport {
    pub witness: DivergenceWitness,
    pub rows: Vec<FockRow>,
    pub contrast: OscillatorContrast,
}

pub fn run_fock_demo(x: f64, nmax: usize) -> Result<FockDemoReport, CliError> {
    let witness = divergence_witness(x, nmax)?;
    let expansion = pthamil_core::fockdemo::expand_position_state(x, 1.0, nmax)?;
    let rows = (0..=nmax)
        .map(|n| FockRow {
            n,
            coefficient: expansion.coeffs[n],
            squared: expansion.coeffs[n] * expansion.coeffs[n],
            partial_norm: witness.partial_norms[n],
            harmonic: witness.harmonic_comparison[n],
        })
        .collect();
    Ok(FockDemoReport {
        witness,
        rows,
        contrast: oscillator_contrast(nmax.min(80))?,
    })
}

/// Rows printed to the terminal: the first ten, then every power of two.
fn shown(n: usize) -> bool {
    n < 10 || n.is_power_of_two()
}

pub fn render_fock_demo(r: &FockDemoReport) -> String {
    let w = &r.witness;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "position eigenstate |x⟩ with x = {} in the Fock basis, c_0 = 1",
        number(w.x)
    );
    let _ = writeln!(
        out,
        "{:>6}  {:>20}  {:>20}  {:>20}  {:>20}",
        "n", "c_n", "c_n²", "Σ c_k²", "harmonic"
    );
    for row in r.rows.iter().filter(|row| shown(row.n) || row.n == w.nmax) {
        let _ = writeln!(
            out,
            "{:>6}  {:>20}  {:>20}  {:>20}  {:>20}",
            row.n,
            number(row.coefficient),
            number(row.squared),
            number(row.partial_norm),
            number(row.harmonic)
        );
    }
    let _ = writeln!(
        out,
        "\nc_n² ~ n^{} over n ∈ [{}, {}]: {}",
        number(w.tail_exponent),
        w.tail_range.0,
        w.tail_range.1,
        if w.diverges {
            "slower than 1/n, so Σ c_n² diverges and |x⟩ is not normalizable"
        } else {
            "no divergence detected"
        }
    );
    let c = &r.contrast;
    let _ = writeln!(
        out,
        "\nharmonic oscillator a†a + 1/2: every eigenstate has unit norm (max error {})",
        residual(c.max_norm_error)
    );
    let _ = writeln!(out, "truncated a + a†, eigenvector nearest 0 scaled to c_0 = 1:");
    for p in &c.position {
        let _ = writeln!(
            out,
            "  dim {:>3}: eigenvalue {:>20}, norm² {}",
            p.dim,
            number(p.eigenvalue),
            number(p.norm_with_unit_c0)
        );
    }
    out
}

pub fn write_fock_csv(r: &FockDemoReport, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::other(format!("{}: {e}", path.display())))?;
    for row in &r.rows {
        w.serialize(row).map_err(|e| CliError::other(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::other(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveStep {
    pub t: f64,
    pub state: Vec<C64>,
    pub dirac_norm: f64,
    pub v_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub initial: Vec<C64>,
    pub steps: Vec<EvolveStep>,
    /// `max_t |⟨ψ(t)|V|ψ(t)⟩ − ⟨ψ(0)|V|ψ(0)⟩| / ⟨ψ(0)|V|ψ(0)⟩`.
    pub v_norm_drift: f64,
}

/// `|ψ(t)⟩ = exp(−iHt)|ψ⟩` with its Dirac and metric norms. Without an
/// initial state, `|ψ⟩ = e_0`.
pub fn run_evolve(cfg: &AnalysisConfig, state: Option<Vec<C64>>) -> Result<EvolveReport, CliError> {
    cfg.validate()?;
    let h = cfg.hamiltonian()?;
    let n = h.dim();
    let initial = state.unwrap_or_else(|| {
        let mut e0 = vec![c64(0.0, 0.0); n];
        e0[0] = c64(1.0, 0.0);
        e0
    });
    if initial.len() != n {
        return Err(CliError::parse(format!(
            "state has {} entries, Hamiltonian is {n}×{n}",
            initial.len()
        )));
    }
    if vec_norm(&initial) == 0.0 {
        return Err(CliError::parse("initial state is zero"));
    }
    let es = eigendecompose(&h, cfg.tol)?;
    let cls = classify(&es, cfg.tol)?;
    let v = build_metric(&es, &cls)?.v;
    let v0 = sandwich(&initial, &v, &initial).re;
    let steps: Vec<EvolveStep> = cfg
        .times
        .iter()
        .map(|&t| {
            let psi = es.evolution(t).matvec(&initial);
            EvolveStep {
                t,
                dirac_norm: vec_norm(&psi).powi(2),
                v_norm: sandwich(&psi, &v, &psi).re,
                state: psi,
            }
        })
        .collect();
    let v_norm_drift = steps
        .iter()
        .map(|s| (s.v_norm - v0).abs() / v0.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(EvolveReport {
        initial,
        steps,
        v_norm_drift,
    })
}

pub fn render_evolve(r: &EvolveReport) -> String {
    let mut out = String::new();
    let init: Vec<String> = r.initial.iter().map(|&z| complex(z)).collect();
    let _ = writeln!(out, "|ψ(0)⟩ = ({})", init.join(", "));
    let _ = writeln!(out, "{:>12}  {:>20}  {:>20}  state", "t", "⟨ψ|ψ⟩", "⟨ψ|V|ψ⟩");
    for s in &r.steps {
        let state: Vec<String> = s.state.iter().map(|&z| complex(z)).collect();
        let _ = writeln!(
            out,
            "{:>12}  {:>20}  {:>20}  ({})",
            number(s.t),
            number(s.dirac_norm),
            number(s.v_norm),
            state.join(", ")
        );
    }
    let _ = writeln!(out, "relative drift of ⟨ψ|V|ψ⟩: {}", residual(r.v_norm_drift));
    out
}
