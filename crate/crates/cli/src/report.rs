//! The analysis pipeline and its report.

use pthamil_core::antilinear::{fix_pt_phases, PTPhases};
use pthamil_core::cpt::{
    build_c, build_pv, c_pt_diagnostic, canonical_c_signs, p_intertwining_residual, pair_completeness_check,
    parity_gauge, CommutantOp, Diagnostic, PairCompleteness,
};
use pthamil_core::intertwiner::{build_metric, converse_residual, v_gram, verify_time_independence, NormFlags};
use pthamil_core::linalg::eigendecompose;
use pthamil_core::spectra::{antilinear_symmetry_residual, classify, SpectrumKind};
use pthamil_core::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::error::CliError;

/// A report section that either ran or was not applicable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Section<T> {
    Skipped { skipped: String },
    Done(T),
}

impl<T> Section<T> {
    pub fn skipped(reason: impl Into<String>) -> Self {
        Section::Skipped { skipped: reason.into() }
    }

    pub fn done(&self) -> Option<&T> {
        match self {
            Section::Done(t) => Some(t),
            Section::Skipped { .. } => None,
        }
    }
}

/// An asserted identity: its residual, the threshold and the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(residual: f64, threshold: f64) -> Self {
        Self {
            residual,
            threshold,
            passed: residual <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSection {
    pub kind: SpectrumKind,
    pub eigenvalues: Vec<C64>,
    /// `(n⁺, n⁻)` index pairs with `E(n⁺) = conj E(n⁻)` and `Im E(n⁺) > 0`.
    pub pairs: Vec<(usize, usize)>,
    pub real_indices: Vec<usize>,
    /// Condition number of the right-eigenvector matrix against the
    /// exceptional-point threshold `1/tol`.
    pub condition: Check,
    /// `‖L R − I‖`.
    pub biorthogonality: Check,
    /// `‖R diag(E) L − H‖ / ‖H‖`.
    pub reconstruction: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTable {
    /// Columns are `|R_n⟩`.
    pub right: ComplexMatrix,
    /// Rows are `⟨L_n|`.
    pub left: ComplexMatrix,
    pub normalization: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtSymmetrySection {
    /// Linear part `U` of `PT: v ↦ U conj(v)`.
    pub operator: ComplexMatrix,
    /// `‖PT H PT⁻¹ − H‖ / ‖H‖`.
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSection {
    pub positive_definite: bool,
    pub hermitian: bool,
    /// `‖V H − H† V‖ / (‖V‖ ‖H‖)`.
    pub intertwining: Check,
    /// `V H − H† V` rebuilt from the `t = 0` Gram data.
    pub converse: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramSection {
    pub dirac: ComplexMatrix,
    pub v: ComplexMatrix,
    pub p: Option<ComplexMatrix>,
    pub pt: Option<ComplexMatrix>,
    pub flags: NormFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSection {
    pub times: Vec<f64>,
    pub max_drift: f64,
    pub threshold: f64,
    pub passed: bool,
    pub drift: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSection {
    pub matrix: ComplexMatrix,
    pub alphas: Vec<C64>,
    pub squares_to_identity: bool,
    pub alphas_real: bool,
    pub degenerate: bool,
    /// `‖[PV, H]‖ / (‖PV‖ ‖H‖)`.
    pub commutator: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CSection {
    pub matrix: ComplexMatrix,
    pub signs: Vec<f64>,
    pub signs_from: String,
    pub squares_to_identity: bool,
    pub commutator: Check,
    pub commutes_with_pt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSection {
    pub verdict: Diagnostic,
    /// Relative `‖C·PT − PT·C‖`.
    pub check: Check,
    /// `C = ±I` commutes with everything, so the verdict carries no
    /// information.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub hamiltonian: ComplexMatrix,
    pub spectrum: SpectrumSection,
    pub eigenvectors: EigenTable,
    pub pt_symmetry: PtSymmetrySection,
    pub parity_intertwining: Section<Check>,
    pub pt_phases: Section<PTPhases>,
    #[serde(rename = "S")]
    pub s: Section<ComplexMatrix>,
    #[serde(rename = "V")]
    pub v: ComplexMatrix,
    pub metric: MetricSection,
    pub gram: GramSection,
    pub time_independence: TimeSection,
    pub selection_rule_violations: Vec<(usize, usize)>,
    pub pv: Section<PvSection>,
    pub c: Section<CSection>,
    pub diagnostic: Section<DiagnosticSection>,
    pub pair_completeness: Section<PairCompleteness>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::parse(e.to_string()))
    }
}

fn pv_section(op: &CommutantOp, threshold: f64) -> PvSection {
    PvSection {
        matrix: op.matrix.clone(),
        alphas: op.alphas.clone(),
        squares_to_identity: op.squares_to_identity,
        alphas_real: op.alphas_real,
        degenerate: op.degenerate,
        commutator: Check::new(op.commutator_residual, threshold),
    }
}

/// eigendecompose → classify → PT phases → metric → Gram matrices → time
/// evolution → PV → C → `[C, PT]` → pair relations.
pub fn run_analyze(cfg: &AnalysisConfig) -> Result<AnalysisReport, CliError> {
    cfg.validate()?;
    let h = cfg.hamiltonian()?;
    let n = h.dim();
    let tol = cfg.tol;
    let check_tol = cfg.identity_tol;
    let pt = cfg.pt_operator(n)?;
    let p = cfg.parity.as_ref().map(|op| op.load(n)).transpose()?;
    let mut notes = Vec::new();

    let es = eigendecompose(&h, tol)?;
    let cls = classify(&es, tol)?;
    let cond_threshold = 1.0 / tol;
    let eig_threshold = check_tol * es.condition.max(1.0);
    let spectrum = SpectrumSection {
        kind: cls.kind,
        eigenvalues: es.values.clone(),
        pairs: cls.pairs.clone(),
        real_indices: cls.real_indices.clone(),
        condition: Check::new(es.condition, cond_threshold),
        biorthogonality: Check::new(es.biorthogonality_residual(), eig_threshold),
        reconstruction: Check::new(es.reconstruction_residual(&h), eig_threshold),
    };

    let pt_symmetry = PtSymmetrySection {
        operator: pt.u.clone(),
        check: Check::new(antilinear_symmetry_residual(&h, &pt, tol)?, check_tol),
    };
    if !pt_symmetry.check.passed {
        notes.push(
            "the supplied PT operator is not a symmetry of H; the spectrum may still be real or paired \
             under some other antilinear symmetry"
                .into(),
        );
    }

    let parity_intertwining = match &p {
        Some(p) => Section::Done(Check::new(p_intertwining_residual(&h, p, tol)?, check_tol)),
        None => Section::skipped("no parity operator given"),
    };
    let p_ok = parity_intertwining.done().is_some_and(|c| c.passed);

    let (es, pt_phases) = if cls.kind != SpectrumKind::AllReal {
        (es, Section::skipped("complex-pair eigenstates are not PT eigenstates"))
    } else {
        let gauged = match (&p, p_ok) {
            (Some(p), true) => match parity_gauge(&es, &cls, p, &pt, tol.max(check_tol)) {
                Ok(found) => Some(found),
                Err(e) => {
                    notes.push(format!("parity-adapted normalization unavailable: {e}"));
                    None
                }
            },
            _ => None,
        };
        match gauged {
            Some((es, phases)) => (es, Section::Done(phases)),
            None => match fix_pt_phases(&pt, &es, &cls, tol.max(check_tol)) {
                Ok((phases, fixed)) => (fixed, Section::Done(phases)),
                Err(e) => (es, Section::skipped(format!("PT phases unavailable: {e}"))),
            },
        }
    };

    let itw = build_metric(&es, &cls)?;
    let metric = MetricSection {
        positive_definite: itw.positive,
        hermitian: itw.hermitian,
        intertwining: Check::new(itw.residual, check_tol),
        converse: Check::new(converse_residual(&es, &itw.v), check_tol),
    };
    let s = match &itw.s {
        Some(s) => Section::Done(s.clone()),
        None => Section::skipped("no similarity to a Hermitian matrix: spectrum is not all real"),
    };

    let mut norms = v_gram(&es, &cls, &itw, check_tol);
    if let Some(p) = &p {
        norms = norms.with_parity(&es, p);
    }
    if let (Some(phases), Some(p)) = (pt_phases.done(), &p) {
        norms = norms.with_pt(&es, p, phases);
    }
    let gram = GramSection {
        dirac: norms.dirac,
        v: norms.vnorm,
        p: norms.pnorm,
        pt: norms.ptnorm,
        flags: norms.flags,
    };

    let ti = verify_time_independence(&es, &itw.v, &cfg.times, cfg.drift_tol);
    let time_independence = TimeSection {
        passed: ti.all_passed(),
        times: ti.times,
        max_drift: ti.max_drift,
        threshold: cfg.drift_tol,
        drift: ti.drift,
    };

    let pv_op = match (&p, &parity_intertwining) {
        (None, _) => Err("no parity operator given".to_string()),
        (Some(_), Section::Done(c)) if !c.passed => Err(format!(
            "P does not intertwine: ‖P⁻¹HP − H†‖/‖H‖ = {:.3e} > {:.3e}",
            c.residual, c.threshold
        )),
        (Some(p), _) => build_pv(&es, p, &itw.v, check_tol).map_err(|e| e.to_string()),
    };
    if let Ok(op) = &pv_op {
        if !op.squares_to_identity {
            notes.push("(PV)² ≠ I for this metric: PV is a symmetry of H but not a C operator".into());
        }
        if cls.kind == SpectrumKind::ConjugatePairs {
            notes.push("complex pairs: PV and C connect only conjugate partners; only the V norm is meaningful".into());
        }
    }
    let pv = match &pv_op {
        Ok(op) => Section::Done(pv_section(op, check_tol)),
        Err(reason) => Section::skipped(reason.clone()),
    };

    let signs: Result<(Vec<f64>, &str), String> = if let Some(signs) = &cfg.c_signs {
        Ok((signs.clone(), "user"))
    } else if let (Ok(op), SpectrumKind::AllReal) = (&pv_op, cls.kind) {
        if op.degenerate || !op.alphas_real {
            Err("PV has degenerate or non-real eigenvalues; supply C signs explicitly".into())
        } else {
            Ok((canonical_c_signs(op), "sign of the PV eigenvalues"))
        }
    } else if cls.kind == SpectrumKind::ConjugatePairs {
        Ok((
            vec![1.0; cls.real_indices.len() + cls.pairs.len()],
            "default +1 per level and per pair",
        ))
    } else {
        Err("no intertwining parity operator: supply C signs explicitly".into())
    };

    let c_op = signs.and_then(|(signs, from)| {
        build_c(&es, &cls, &signs, check_tol)
            .map(|op| (op, signs, from.to_string()))
            .map_err(|e| e.to_string())
    });
    let (c, diagnostic) = match c_op {
        Ok((op, signs, signs_from)) => {
            let d = c_pt_diagnostic(&op, &pt, check_tol);
            let section = CSection {
                matrix: op.matrix.clone(),
                signs,
                signs_from,
                squares_to_identity: op.squares_to_identity,
                commutator: Check::new(op.commutator_residual, check_tol),
                commutes_with_pt: d.verdict == Diagnostic::RealSpectrum,
            };
            if d.degenerate {
                notes.push("C = ±I: the [C, PT] diagnostic is trivially satisfied".into());
            }
            let diag = DiagnosticSection {
                verdict: d.verdict,
                check: Check::new(d.residual, check_tol),
                degenerate: d.degenerate,
            };
            (Section::Done(section), Section::Done(diag))
        }
        Err(reason) => (
            Section::skipped(reason.clone()),
            Section::skipped(format!("no C operator: {reason}")),
        ),
    };

    let pair_completeness = if cls.kind == SpectrumKind::ConjugatePairs {
        match pair_completeness_check(&es, &cls, check_tol) {
            Ok(pc) => Section::Done(pc),
            Err(e) => Section::skipped(e.to_string()),
        }
    } else {
        Section::skipped("spectrum is all real")
    };

    let normalization = match (&pv, cls.kind) {
        (Section::Done(_), SpectrumKind::AllReal) if pt_phases.done().is_some() && p_ok => {
            "PT phase η = ±1 with sign matching ⟨R|P|R⟩, scaled so |⟨R|P|R⟩| = 1"
        }
        (_, SpectrumKind::AllReal) if pt_phases.done().is_some() => {
            "largest component 1, then rephased so the PT phase η = ±1"
        }
        _ => "largest component 1",
    };

    Ok(AnalysisReport {
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
        },
        hamiltonian: h,
        spectrum,
        eigenvectors: EigenTable {
            right: es.right.clone(),
            left: es.left.clone(),
            normalization: normalization.into(),
        },
        pt_symmetry,
        parity_intertwining,
        pt_phases,
        s,
        v: itw.v,
        metric,
        gram,
        selection_rule_violations: ti.selection_rule_violations,
        time_independence,
        pv,
        c,
        diagnostic,
        pair_completeness,
        notes,
    })
}
