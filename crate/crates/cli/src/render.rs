//! Human-readable and CSV output. Numbers carry 12 significant digits;
//! residuals are always in scientific notation.

use std::fmt::Write as _;

use pthamil_core::{ComplexMatrix, C64};

use crate::report::{AnalysisReport, Check, Section};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` to 12 significant digits, fixed-point for moderate magnitudes and
/// scientific otherwise.
pub fn number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..12).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        sci
    }
}

pub fn residual(x: f64) -> String {
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
}

pub fn complex(z: C64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => number(z.re),
        (true, false) => format!("{}i", number(z.im)),
        (false, false) if z.im < 0.0 => format!("{}-{}i", number(z.re), number(-z.im)),
        (false, false) => format!("{}+{}i", number(z.re), number(z.im)),
    }
}

pub fn matrix(m: &ComplexMatrix, indent: &str) -> String {
    let cells: Vec<Vec<String>> = m
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|&z| complex(z)).collect())
        .collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells {
        out.push_str(indent);
        out.push('[');
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&padded.join("  "));
        out.push_str("]\n");
    }
    out
}

fn check(label: &str, c: &Check) -> String {
    format!(
        "  {label}: {} (residual {}, threshold {})\n",
        if c.passed { "ok" } else { "FAILED" },
        residual(c.residual),
        residual(c.threshold)
    )
}

fn skipped<T>(out: &mut String, title: &str, s: &Section<T>) -> bool {
    if let Section::Skipped { skipped } = s {
        let _ = writeln!(out, "\n{title}\n  skipped: {skipped}");
        true
    } else {
        false
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", r.provenance.tool, r.provenance.version);
    let _ = writeln!(out, "\nHamiltonian ({0}×{0})", r.hamiltonian.dim());
    out.push_str(&matrix(&r.hamiltonian, "  "));

    let s = &r.spectrum;
    let _ = writeln!(out, "\nSpectrum: {:?}", s.kind);
    for (k, e) in s.eigenvalues.iter().enumerate() {
        let tag = match s.pairs.iter().find(|&&(p, m)| p == k || m == k) {
            Some(&(p, m)) => format!("  (pair {p}↔{m})"),
            None => String::new(),
        };
        let _ = writeln!(out, "  E[{k}] = {}{tag}", complex(*e));
    }
    let _ = writeln!(
        out,
        "  eigenvector condition number: {} (exceptional above {})",
        number(s.condition.residual),
        number(s.condition.threshold)
    );
    out.push_str(&check("biorthogonality ‖LR − I‖", &s.biorthogonality));
    out.push_str(&check("reconstruction", &s.reconstruction));
    let _ = writeln!(out, "\nEigenvectors ({})", r.eigenvectors.normalization);
    let _ = writeln!(out, "  R (columns |R_n⟩):");
    out.push_str(&matrix(&r.eigenvectors.right, "    "));
    let _ = writeln!(out, "  L (rows ⟨L_n|):");
    out.push_str(&matrix(&r.eigenvectors.left, "    "));

    let _ = writeln!(out, "\nPT symmetry (PT: v ↦ U conj(v))");
    let _ = writeln!(out, "  U:");
    out.push_str(&matrix(&r.pt_symmetry.operator, "    "));
    out.push_str(&check("PT H PT⁻¹ = H", &r.pt_symmetry.check));

    if !skipped(&mut out, "Parity", &r.parity_intertwining) {
        if let Section::Done(c) = &r.parity_intertwining {
            let _ = writeln!(out, "\nParity");
            out.push_str(&check("P⁻¹ H P = H†", c));
        }
    }

    if !skipped(&mut out, "PT phases", &r.pt_phases) {
        if let Section::Done(ph) = &r.pt_phases {
            let _ = writeln!(out, "\nPT phases");
            for (k, (eta, raw)) in ph.eta.iter().zip(&ph.raw_eta).enumerate() {
                let _ = writeln!(
                    out,
                    "  η[{k}] = {}  (before rephasing {})",
                    complex(*eta),
                    complex(*raw)
                );
            }
            if !ph.rebased.is_empty() {
                let _ = writeln!(
                    out,
                    "  degenerate clusters rebased onto PT eigenstates: {:?}",
                    ph.rebased
                );
            }
        }
    }

    if !skipped(&mut out, "Similarity S (S H S⁻¹ Hermitian)", &r.s) {
        if let Section::Done(m) = &r.s {
            let _ = writeln!(out, "\nSimilarity S (S H S⁻¹ Hermitian)");
            out.push_str(&matrix(m, "  "));
        }
    }
    let _ = writeln!(out, "\nMetric V (V H V⁻¹ = H†)");
    out.push_str(&matrix(&r.v, "  "));
    let _ = writeln!(
        out,
        "  Hermitian: {}, positive definite: {}",
        r.metric.hermitian, r.metric.positive_definite
    );
    out.push_str(&check("V H − H† V = 0", &r.metric.intertwining));
    out.push_str(&check("V H − H† V from Gram data", &r.metric.converse));

    let g = &r.gram;
    let _ = writeln!(out, "\nGram matrices ⟨R_n| M |R_m⟩");
    let _ = writeln!(out, "  Dirac (M = I):");
    out.push_str(&matrix(&g.dirac, "    "));
    let _ = writeln!(out, "  V:");
    out.push_str(&matrix(&g.v, "    "));
    if let Some(p) = &g.p {
        let _ = writeln!(out, "  P:");
        out.push_str(&matrix(p, "    "));
    }
    if let Some(pt) = &g.pt {
        let _ = writeln!(out, "  PT conjugate with intrinsic phase (η_n⁻¹ ⟨R_n|P|R_m⟩):");
        out.push_str(&matrix(pt, "    "));
    }
    let f = &g.flags;
    let _ = writeln!(out, "  V Gram = I: {}", f.vnorm_identity);
    if !r.spectrum.pairs.is_empty() {
        let _ = writeln!(
            out,
            "  V Gram connects only conjugate partners: {}",
            f.vnorm_transition_only
        );
    }
    let _ = writeln!(
        out,
        "  Dirac overlaps nonzero off the diagonal: {}",
        f.dirac_nonorthogonal
    );
    if let Some(b) = f.ptnorm_equals_vnorm {
        let _ = writeln!(out, "  PT Gram = V Gram: {b}");
    }

    let t = &r.time_independence;
    let times: Vec<String> = t.times.iter().map(|&x| number(x)).collect();
    let _ = writeln!(
        out,
        "\nTime independence of ⟨R_n(t)|V|R_m(t)⟩, t ∈ {{{}}}",
        times.join(", ")
    );
    let _ = writeln!(
        out,
        "  {}: max relative drift {} (threshold {})",
        if t.passed { "ok" } else { "FAILED" },
        residual(t.max_drift),
        residual(t.threshold)
    );
    if r.selection_rule_violations.is_empty() {
        let _ = writeln!(out, "  selection rule E_m = conj E_n for nonzero entries: ok");
    } else {
        let _ = writeln!(out, "  selection rule violated at {:?}", r.selection_rule_violations);
    }

    if !skipped(&mut out, "PV", &r.pv) {
        if let Section::Done(pv) = &r.pv {
            let _ = writeln!(out, "\nPV");
            out.push_str(&matrix(&pv.matrix, "  "));
            let alphas: Vec<String> = pv.alphas.iter().map(|&a| complex(a)).collect();
            let _ = writeln!(out, "  α_n = ⟨L_n|PV|R_n⟩: {}", alphas.join(", "));
            let _ = writeln!(
                out,
                "  α real: {}, degenerate: {}, (PV)² = I: {}",
                pv.alphas_real, pv.degenerate, pv.squares_to_identity
            );
            out.push_str(&check("[PV, H] = 0", &pv.commutator));
        }
    }
    if !skipped(&mut out, "C", &r.c) {
        if let Section::Done(c) = &r.c {
            let signs: Vec<String> = c.signs.iter().map(|&s| number(s)).collect();
            let _ = writeln!(out, "\nC (signs {} from {})", signs.join(", "), c.signs_from);
            out.push_str(&matrix(&c.matrix, "  "));
            let _ = writeln!(out, "  C² = I: {}", c.squares_to_identity);
            out.push_str(&check("[C, H] = 0", &c.commutator));
        }
    }
    if !skipped(&mut out, "Diagnostic [C, PT]", &r.diagnostic) {
        if let Section::Done(d) = &r.diagnostic {
            let verdict = match d.verdict {
                pthamil_core::cpt::Diagnostic::RealSpectrum => "C commutes with PT: real spectrum",
                pthamil_core::cpt::Diagnostic::ComplexPairs => "C does not commute with PT: complex pairs",
            };
            let _ = writeln!(out, "\nDiagnostic [C, PT]: {verdict}");
            let _ = writeln!(
                out,
                "  ‖[C, PT]‖ = {} (zero below {})",
                residual(d.check.residual),
                residual(d.check.threshold)
            );
            if d.degenerate {
                let _ = writeln!(out, "  (C = ±I, so the verdict is uninformative)");
            }
        }
    }
    if !skipped(&mut out, "Complex-pair relations", &r.pair_completeness) {
        if let Section::Done(pc) = &r.pair_completeness {
            let _ = writeln!(out, "\nComplex-pair relations (⟨L_n| = ⟨R_n|V)");
            let _ = writeln!(out, "  ⟨L⁻|R⁺⟩ = ⟨L⁺|R⁻⟩ = δ: {}", residual(pc.cross_overlap_error));
            let _ = writeln!(out, "  ⟨L⁻|R⁻⟩ = ⟨L⁺|R⁺⟩ = 0: {}", residual(pc.same_overlap_error));
            let _ = writeln!(out, "  completeness: {}", residual(pc.completeness_error));
            let _ = writeln!(out, "  spectral resolution of H: {}", residual(pc.resolution_error));
            let _ = writeln!(out, "  {}", if pc.passed { "ok" } else { "FAILED" });
        }
    }
    if !r.notes.is_empty() {
        let _ = writeln!(out, "\nNotes");
        for n in &r.notes {
            let _ = writeln!(out, "  - {n}");
        }
    }
    out
}

/// One row per eigenstate: energy, conjugate partner, `⟨R_n|V|R_n⟩`, Dirac
/// norm and PT phase.
pub fn render_csv(r: &AnalysisReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "energy_re",
        "energy_im",
        "partner",
        "v_diag_re",
        "v_diag_im",
        "dirac_norm",
        "eta_re",
        "eta_im",
    ])
    .expect("in-memory write");
    let phases = r.pt_phases.done();
    for (k, e) in r.spectrum.eigenvalues.iter().enumerate() {
        let partner = r
            .spectrum
            .pairs
            .iter()
            .find_map(|&(p, m)| {
                if p == k {
                    Some(m)
                } else if m == k {
                    Some(p)
                } else {
                    None
                }
            })
            .map(|j| j.to_string())
            .unwrap_or_default();
        let v = r.gram.v[(k, k)];
        let (eta_re, eta_im) = phases
            .map(|ph| (number(ph.eta[k].re), number(ph.eta[k].im)))
            .unwrap_or_default();
        w.write_record([
            k.to_string(),
            number(e.re),
            number(e.im),
            partner,
            number(v.re),
            number(v.im),
            number(r.gram.dirac[(k, k)].re),
            eta_re,
            eta_im,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use pthamil_core::c64;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number(0.75), "0.75");
        assert_eq!(number(1.0 / 3.0), "0.333333333333");
        assert_eq!(number(-4.0), "-4");
        assert_eq!(number(123456.7890123456), "123456.789012");
        assert_eq!(number(1.5e-9), "1.50000000000e-9");
        assert_eq!(number(2.0f64.sqrt() * 1e15), "1.41421356237e15");
        assert_eq!(residual(3.0e-17), "3.00000000000e-17");
        assert_eq!(complex(c64(1.0, -0.5)), "1-0.5i");
        assert_eq!(complex(c64(0.0, 2.0)), "2i");
    }
}
