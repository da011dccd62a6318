//! Similarity to Hermitian form, the metric `V` with `V H V⁻¹ = H†`, and the
//! Gram matrices of the eigenbasis under the various inner products.

use serde::{Deserialize, Serialize};

use crate::antilinear::{pt_gram, PTPhases};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, ComplexMatrix, EigenSystem, C64};
use crate::spectra::{SpectrumClass, SpectrumKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intertwiner {
    /// `S` with `S H S⁻¹` Hermitian; present only for an all-real spectrum.
    pub s: Option<ComplexMatrix>,
    pub v: ComplexMatrix,
    pub positive: bool,
    pub hermitian: bool,
    /// `‖V H − H† V‖ / (‖V‖ ‖H‖)`.
    pub residual: f64,
}

/// `S = L`, so that `S H S⁻¹ = diag(E)`.
pub fn build_similarity(es: &EigenSystem, cls: &SpectrumClass) -> Result<ComplexMatrix> {
    if cls.kind != SpectrumKind::AllReal {
        return Err(Error::NotRealSpectrum);
    }
    Ok(es.left.clone())
}

/// Builds the metric from the biorthonormal eigensystem.
///
/// Real spectrum: `V = Σ |L_n⟩⟨L_n| = L†L = S†S`, positive definite.
/// Conjugate pairs: each pair `(n⁺, n⁻)` contributes
/// `|L_{n⁻}⟩⟨L_{n⁺}| + |L_{n⁺}⟩⟨L_{n⁻}|`, giving a Hermitian, indefinite `V`
/// whose eigenbasis matrix elements connect only the two members of a pair.
pub fn build_metric(es: &EigenSystem, cls: &SpectrumClass) -> Result<Intertwiner> {
    if cls.kind == SpectrumKind::Exceptional {
        return Err(Error::NonDiagonalizable {
            condition: es.condition,
            threshold: 1.0 / cls.tol,
        });
    }
    let n = es.dim();
    let outer = |a: usize, b: usize| -> ComplexMatrix {
        // |L_a⟩⟨L_b| = (row a)† (row b)
        let (ra, rb) = (es.left_row(a), es.left_row(b));
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ra[i].conj() * rb[j];
            }
        }
        m
    };

    let mut v = ComplexMatrix::zeros(n);
    for &k in &cls.real_indices {
        v = &v + &outer(k, k);
    }
    for &(plus, minus) in &cls.pairs {
        v = &v + &outer(minus, plus);
        v = &v + &outer(plus, minus);
    }

    let h = es.reconstruct();
    let residual = intertwining_residual(&v, &h);
    let hermitian = v.is_hermitian(1e-12);
    let (s, positive) = match cls.kind {
        SpectrumKind::AllReal => (Some(es.left.clone()), v.is_positive_definite(1e-12)),
        _ => (None, false),
    };
    Ok(Intertwiner {
        s,
        v,
        positive,
        hermitian,
        residual,
    })
}

/// `‖V H − H† V‖_F / (‖V‖_F ‖H‖_F)`.
pub fn intertwining_residual(v: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let lhs = v * h;
    let rhs = &h.adjoint() * v;
    lhs.distance(&rhs) / (v.norm_fro() * h.norm_fro()).max(f64::MIN_POSITIVE)
}

/// `⟨R_n| M |R_m⟩` for all `n, m`, i.e. `R† M R`.
pub fn gram(es: &EigenSystem, m: &ComplexMatrix) -> ComplexMatrix {
    &(&es.right.adjoint() * m) * &es.right
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormFlags {
    /// V Gram equals the identity (expected for a real spectrum).
    pub vnorm_identity: bool,
    /// Complex pairs: V Gram is nonzero only between conjugate partners
    /// (and on the diagonal of any real levels).
    pub vnorm_transition_only: bool,
    /// Some off-diagonal Dirac overlap is nonzero.
    pub dirac_nonorthogonal: bool,
    pub pnorm_diagonal: Option<bool>,
    /// Each `⟨R_n|P|R_n⟩` is real.
    pub pnorm_real: Option<bool>,
    /// η-corrected PT Gram equals the V Gram.
    pub ptnorm_equals_vnorm: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub dirac: ComplexMatrix,
    pub vnorm: ComplexMatrix,
    pub pnorm: Option<ComplexMatrix>,
    pub ptnorm: Option<ComplexMatrix>,
    pub flags: NormFlags,
    pub tol: f64,
}

/// Dirac and V Gram matrices with their flags.
pub fn v_gram(es: &EigenSystem, cls: &SpectrumClass, itw: &Intertwiner, tol: f64) -> NormReport {
    let n = es.dim();
    let dirac = gram(es, &ComplexMatrix::identity(n));
    let vnorm = gram(es, &itw.v);

    let vnorm_identity = vnorm.distance(&ComplexMatrix::identity(n)) <= tol * (n as f64).max(1.0);
    let mut vnorm_transition_only = !cls.pairs.is_empty();
    for i in 0..n {
        for j in 0..n {
            let partner = cls.partner(i);
            let expected = if partner == Some(j) || (i == j && partner.is_none()) {
                1.0
            } else {
                0.0
            };
            if (vnorm[(i, j)] - C64::new(expected, 0.0)).norm() > tol {
                vnorm_transition_only = false;
            }
        }
    }
    let dirac_nonorthogonal = (0..n).any(|i| (0..n).any(|j| i != j && dirac[(i, j)].norm() > tol));
    NormReport {
        dirac,
        vnorm,
        pnorm: None,
        ptnorm: None,
        flags: NormFlags {
            vnorm_identity,
            vnorm_transition_only,
            dirac_nonorthogonal,
            pnorm_diagonal: None,
            pnorm_real: None,
            ptnorm_equals_vnorm: None,
        },
        tol,
    }
}

impl NormReport {
    /// Adds `⟨R_n|P|R_m⟩`.
    pub fn with_parity(mut self, es: &EigenSystem, p: &ComplexMatrix) -> Self {
        let g = gram(es, p);
        let n = es.dim();
        let tol = self.tol;
        self.flags.pnorm_diagonal = Some((0..n).all(|i| (0..n).all(|j| i == j || g[(i, j)].norm() <= tol)));
        self.flags.pnorm_real = Some((0..n).all(|i| g[(i, i)].im.abs() <= tol * g[(i, i)].norm().max(1.0)));
        self.pnorm = Some(g);
        self
    }

    /// Adds the η-corrected PT-conjugate Gram matrix and compares it with the
    /// V Gram entrywise.
    pub fn with_pt(mut self, es: &EigenSystem, p: &ComplexMatrix, phases: &PTPhases) -> Self {
        let g = pt_gram(p, phases, es);
        let max_diff = g
            .as_slice()
            .iter()
            .zip(self.vnorm.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        self.flags.ptnorm_equals_vnorm = Some(max_diff <= self.tol);
        self.ptnorm = Some(g);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeIndependence {
    pub times: Vec<f64>,
    /// `max_t |⟨R_n(t)|V|R_m(t)⟩ − ⟨R_n(0)|V|R_m(0)⟩|` per entry, relative to
    /// `‖V‖ ‖R_n(t)‖ ‖R_m(t)‖` (norms floored at 1) since complex-phase states
    /// grow exponentially and carry proportional rounding error.
    pub drift: Vec<Vec<f64>>,
    pub max_drift: f64,
    pub passed: Vec<Vec<bool>>,
    /// Entries that are nonzero although `E_m ≠ conj(E_n)`.
    pub selection_rule_violations: Vec<(usize, usize)>,
    pub tol: f64,
}

impl TimeIndependence {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().flatten().all(|&p| p) && self.selection_rule_violations.is_empty()
    }
}

/// Evolves every eigenstate with `exp(−iHt) = R diag(e^{−iE t}) L` and tracks
/// the V Gram matrix over `times`, relative to `t = 0`.
///
/// Also checks the selection rule: an entry `(n, m)` may be nonzero only
/// when `Re E_m = Re E_n` and `Im E_m = −Im E_n`.
pub fn verify_time_independence(es: &EigenSystem, v: &ComplexMatrix, times: &[f64], tol: f64) -> TimeIndependence {
    let n = es.dim();
    let g0 = gram(es, v);
    let vnorm = v.norm_2().max(1.0);
    let mut drift = vec![vec![0.0f64; n]; n];
    for &t in times {
        let u = es.evolution(t);
        let evolved = &u * &es.right;
        let gt = &(&evolved.adjoint() * v) * &evolved;
        let norms: Vec<f64> = (0..n).map(|k| vec_norm(&evolved.column(k)).max(1.0)).collect();
        for i in 0..n {
            for j in 0..n {
                let scale = vnorm * norms[i] * norms[j];
                drift[i][j] = drift[i][j].max((gt[(i, j)] - g0[(i, j)]).norm() / scale);
            }
        }
    }
    let scale = es.spectral_radius().max(f64::MIN_POSITIVE);
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let allowed = (es.values[j] - es.values[i].conj()).norm() <= 1e-8 * scale;
            if !allowed && g0[(i, j)].norm() > tol {
                violations.push((i, j));
            }
        }
    }
    let passed = drift
        .iter()
        .map(|row| row.iter().map(|&d| d <= tol).collect())
        .collect();
    let max_drift = drift.iter().flatten().copied().fold(0.0, f64::max);
    TimeIndependence {
        times: times.to_vec(),
        drift,
        max_drift,
        passed,
        selection_rule_violations: violations,
        tol,
    }
}

/// Recovers `V H − H† V` from the Gram matrix at `t = 0`:
/// `⟨R_n|VH − H†V|R_m⟩ = G_nm (E_m − conj E_n)`, so the operator is
/// `L† W L`. Returns its Frobenius norm relative to `‖V‖ ‖H‖`.
pub fn converse_residual(es: &EigenSystem, v: &ComplexMatrix) -> f64 {
    let n = es.dim();
    let g = gram(es, v);
    let mut w = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] = g[(i, j)] * (es.values[j] - es.values[i].conj());
        }
    }
    let op = &(&es.left.adjoint() * &w) * &es.left;
    op.norm_fro() / (v.norm_fro() * es.reconstruct().norm_fro()).max(f64::MIN_POSITIVE)
}

/// `V' = S⁻¹† V S⁻¹` together with the intertwining residual of `V'` against
/// `H' = S H S⁻¹`.
pub fn metric_transform(
    v: &ComplexMatrix,
    s: &ComplexMatrix,
    h: &ComplexMatrix,
    tol: f64,
) -> Result<(ComplexMatrix, f64)> {
    let sinv = s.inverse(tol)?;
    let vp = &(&sinv.adjoint() * v) * &sinv;
    let hp = &(s * h) * &sinv;
    let residual = intertwining_residual(&vp, &hp);
    Ok((vp, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, eigendecompose, DEFAULT_TOL};
    use crate::spectra::classify;

    fn model(alpha: f64, beta: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, alpha + beta], vec![alpha - beta, 0.0]]).unwrap()
    }

    fn setup(h: &ComplexMatrix) -> (EigenSystem, SpectrumClass, Intertwiner) {
        let es = eigendecompose(h, DEFAULT_TOL).unwrap();
        let cls = classify(&es, DEFAULT_TOL).unwrap();
        let itw = build_metric(&es, &cls).unwrap();
        (es, cls, itw)
    }

    #[test]
    fn real_phase_metric() {
        let h = model(5.0, 3.0);
        let (es, cls, itw) = setup(&h);
        assert!(itw.v.approx_eq(&ComplexMatrix::from_real_diag(&[0.5, 2.0]), 1e-14));
        assert!(itw.positive && itw.hermitian);
        assert!(itw.residual < 1e-15);
        let s = build_similarity(&es, &cls).unwrap();
        let hs = &(&s * &h) * &s.inverse(1e-12).unwrap();
        assert!(hs.is_hermitian(1e-14));
        assert!((&s.adjoint() * &s).approx_eq(&itw.v, 1e-14));
    }

    #[test]
    fn complex_phase_metric() {
        let h = model(3.0, 5.0);
        let (es, cls, itw) = setup(&h);
        assert!(!itw.positive);
        assert!(itw.hermitian);
        assert!(itw.residual < 1e-14);
        let g = gram(&es, &itw.v);
        assert!(g[(0, 0)].norm() < 1e-14 && g[(1, 1)].norm() < 1e-14);
        assert!((g[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-14);
        assert!(matches!(build_similarity(&es, &cls), Err(Error::NotRealSpectrum)));
    }

    #[test]
    fn hermitian_input_with_orthonormal_vectors_gives_identity_metric() {
        let h = ComplexMatrix::from_rows(vec![
            vec![c64(1.0, 0.0), c64(0.0, 2.0)],
            vec![c64(0.0, -2.0), c64(-1.0, 0.0)],
        ])
        .unwrap();
        let es = eigendecompose(&h, DEFAULT_TOL).unwrap().unit_normalized();
        let cls = classify(&es, DEFAULT_TOL).unwrap();
        let itw = build_metric(&es, &cls).unwrap();
        assert!(itw.v.approx_eq(&ComplexMatrix::identity(2), 1e-14));
        let rep = v_gram(&es, &cls, &itw, 1e-12);
        assert!(rep.dirac.approx_eq(&ComplexMatrix::identity(2), 1e-14));
        assert!(rep.flags.vnorm_identity);
        assert!(!rep.flags.dirac_nonorthogonal);
    }

    #[test]
    fn dirac_overlap_of_real_phase() {
        let (es, cls, itw) = setup(&model(5.0, 3.0));
        let rep = v_gram(&es, &cls, &itw, 1e-12);
        // u₋†u₊ = 1 − 1/4
        assert!((rep.dirac[(1, 0)] - c64(0.75, 0.0)).norm() < 1e-14);
        assert!(rep.flags.vnorm_identity);
        assert!(rep.flags.dirac_nonorthogonal);
    }

    #[test]
    fn time_independence_real_phase() {
        let (es, _, itw) = setup(&model(5.0, 3.0));
        let ti = verify_time_independence(&es, &itw.v, &[0.0, 0.7, 3.1], 1e-10);
        assert!(ti.all_passed(), "{ti:?}");
    }

    #[test]
    fn time_independence_complex_phase_and_selection_rule() {
        let (es, _, itw) = setup(&model(3.0, 5.0));
        let ti = verify_time_independence(&es, &itw.v, &[0.0, 0.7, 3.1], 1e-9);
        assert!(ti.all_passed(), "{ti:?}");
        // the Dirac product is not conserved
        let dirac = verify_time_independence(&es, &ComplexMatrix::identity(2), &[0.0, 0.7], 1e-9);
        assert!(!dirac.all_passed());
    }

    #[test]
    fn time_zero_is_trivially_constant() {
        let (es, _, _) = setup(&model(5.0, 3.0));
        let ti = verify_time_independence(&es, &ComplexMatrix::identity(2), &[0.0], 1e-14);
        assert!(ti.max_drift < 1e-14);
    }

    #[test]
    fn metric_transform_to_identity() {
        let h = model(5.0, 3.0);
        let (_, _, itw) = setup(&h);
        let s = itw.s.clone().unwrap();
        let (vp, res) = metric_transform(&itw.v, &s, &h, 1e-12).unwrap();
        assert!(vp.approx_eq(&ComplexMatrix::identity(2), 1e-14));
        assert!(res < 1e-15);
        let (same, _) = metric_transform(&itw.v, &ComplexMatrix::identity(2), &h, 1e-12).unwrap();
        assert_eq!(same, itw.v);
    }

    #[test]
    fn converse_residual_vanishes_for_metric_only() {
        let (es, _, itw) = setup(&model(5.0, 3.0));
        assert!(converse_residual(&es, &itw.v) < 1e-14);
        assert!(converse_residual(&es, &ComplexMatrix::identity(2)) > 1e-2);
    }
}
