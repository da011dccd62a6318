//! The `PV` and `C` operators, the `[C, PT]` diagnostic and the
//! complex-pair completeness relations.

use serde::{Deserialize, Serialize};

use crate::antilinear::{align_pt_signs, fix_pt_phases, AntilinearOp, PTPhases};
use crate::error::{Error, Result};
use crate::intertwiner::{build_metric, gram, intertwining_residual};
use crate::linalg::{sandwich, ComplexMatrix, EigenSystem, C64};
use crate::spectra::{SpectrumClass, SpectrumKind};

/// A linear operator that commutes with `H`, with its eigenvalues in the
/// eigenbasis of `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantOp {
    pub matrix: ComplexMatrix,
    /// `α_n = ⟨L_n| O |R_n⟩`.
    pub alphas: Vec<C64>,
    pub squares_to_identity: bool,
    /// `‖[O, H]‖ / (‖O‖ ‖H‖)`.
    pub commutator_residual: f64,
    pub alphas_real: bool,
    /// `L O R` has off-diagonal entries (degenerate spectrum); the `α_n` are
    /// then not individually meaningful.
    pub degenerate: bool,
}

/// `‖P⁻¹ H P − H†‖ / ‖H‖`.
pub fn p_intertwining_residual(h: &ComplexMatrix, p: &ComplexMatrix, tol: f64) -> Result<f64> {
    let pinv = p.inverse(tol)?;
    let lhs = &(&pinv * h) * p;
    Ok(lhs.distance(&h.adjoint()) / h.norm_fro().max(f64::MIN_POSITIVE))
}

/// True when `P⁻¹ H P = H†` within `tol · ‖H‖`.
pub fn check_p_intertwines(h: &ComplexMatrix, p: &ComplexMatrix, tol: f64) -> bool {
    p_intertwining_residual(h, p, tol).is_ok_and(|r| r <= tol)
}

fn commutant(es: &EigenSystem, matrix: ComplexMatrix, squares_to_identity: bool, tol: f64) -> CommutantOp {
    let h = es.reconstruct();
    let commutator_residual =
        matrix.commutator(&h).norm_fro() / (matrix.norm_fro() * h.norm_fro()).max(f64::MIN_POSITIVE);
    let diag = &(&es.left * &matrix) * &es.right;
    let n = es.dim();
    let alphas: Vec<C64> = diag.diagonal();
    let amax = alphas
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let degenerate = (0..n).any(|i| (0..n).any(|j| i != j && diag[(i, j)].norm() > tol * amax));
    let alphas_real = alphas.iter().all(|a| a.im.abs() <= tol * a.norm().max(1.0));
    CommutantOp {
        matrix,
        alphas,
        squares_to_identity,
        commutator_residual,
        alphas_real,
        degenerate,
    }
}

/// `PV`, which commutes with `H` whenever `P⁻¹ H P = H†`.
///
/// `squares_to_identity` records the explicit test `P V P = V⁻¹`.
pub fn build_pv(es: &EigenSystem, p: &ComplexMatrix, v: &ComplexMatrix, tol: f64) -> Result<CommutantOp> {
    let h = es.reconstruct();
    let residual = p_intertwining_residual(&h, p, tol)?;
    if residual > tol {
        return Err(Error::NotCommuting { residual });
    }
    let pv = p * v;
    let vinv = v.inverse(tol)?;
    let pvp = &pv * p;
    let squares = pvp.distance(&vinv) <= tol * vinv.norm_fro().max(1.0);
    Ok(commutant(es, pv, squares, tol))
}

/// `c_n = sign(Re α_n)`.
pub fn canonical_c_signs(pv: &CommutantOp) -> Vec<f64> {
    pv.alphas.iter().map(|a| if a.re >= 0.0 { 1.0 } else { -1.0 }).collect()
}

/// `C = Σ |R_n⟩ c_n ⟨L_n|`.
///
/// `signs` holds one `±1` per real level (in `cls.real_indices` order)
/// followed by one per conjugate pair (in `cls.pairs` order). A pair with
/// sign `s` contributes `s |R⁺⟩⟨L⁺| − s |R⁻⟩⟨L⁻|`, the `±` assignment that
/// keeps `C² = I` while exchanging roles under PT.
pub fn build_c(es: &EigenSystem, cls: &SpectrumClass, signs: &[f64], tol: f64) -> Result<CommutantOp> {
    if cls.kind == SpectrumKind::Exceptional {
        return Err(Error::Precondition(
            "no C operator for a non-diagonalizable Hamiltonian".into(),
        ));
    }
    let expected = cls.real_indices.len() + cls.pairs.len();
    if signs.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: signs.len(),
        });
    }
    if let Some(s) = signs.iter().find(|s| (s.abs() - 1.0).abs() > 0.0) {
        return Err(Error::Precondition(format!("C signs must be ±1, got {s}")));
    }
    let n = es.dim();
    let mut c = vec![C64::new(0.0, 0.0); n];
    let (real_signs, pair_signs) = signs.split_at(cls.real_indices.len());
    for (&k, &s) in cls.real_indices.iter().zip(real_signs) {
        c[k] = C64::new(s, 0.0);
    }
    for (&(plus, minus), &s) in cls.pairs.iter().zip(pair_signs) {
        c[plus] = C64::new(s, 0.0);
        c[minus] = C64::new(-s, 0.0);
    }
    let matrix = &(&es.right * &ComplexMatrix::from_diag(&c)) * &es.left;
    let squares = (&matrix * &matrix).approx_eq(&ComplexMatrix::identity(n), tol);
    Ok(commutant(es, matrix, squares, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagnostic {
    RealSpectrum,
    ComplexPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptDiagnostic {
    pub verdict: Diagnostic,
    /// `‖C·PT − PT·C‖` on the linear parts, relative to `‖C‖ ‖u‖`.
    pub residual: f64,
    /// `C = ±I`, which commutes with everything and says nothing.
    pub degenerate: bool,
}

/// `[C, PT] = 0` ⇔ real spectrum; otherwise complex pairs.
pub fn c_pt_diagnostic(c: &CommutantOp, pt: &AntilinearOp, tol: f64) -> CptDiagnostic {
    let residual = pt.commutator_residual(&c.matrix) / (c.matrix.norm_fro() * pt.u.norm_fro()).max(f64::MIN_POSITIVE);
    let n = c.matrix.dim();
    let id = ComplexMatrix::identity(n);
    let degenerate = c.matrix.approx_eq(&id, tol) || c.matrix.approx_eq(&id.scale_real(-1.0), tol);
    CptDiagnostic {
        verdict: if residual <= tol {
            Diagnostic::RealSpectrum
        } else {
            Diagnostic::ComplexPairs
        },
        residual,
        degenerate,
    }
}

/// `⟨R_n| V O |R_m⟩`, the V-based matrix elements of an operator.
pub fn v_matrix_elements(es: &EigenSystem, v: &ComplexMatrix, op: &ComplexMatrix) -> ComplexMatrix {
    gram(es, &(v * op))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCompleteness {
    /// `max |⟨L⁻_n|R⁺_m⟩ − δ|`, `max |⟨L⁺_n|R⁻_m⟩ − δ|`.
    pub cross_overlap_error: f64,
    /// `max |⟨L⁻_n|R⁻_m⟩|`, `max |⟨L⁺_n|R⁺_m⟩|`.
    pub same_overlap_error: f64,
    /// `‖Σ |R⁺⟩⟨L⁻| + |R⁻⟩⟨L⁺| (+ real levels) − I‖`.
    pub completeness_error: f64,
    /// Relative error of the spectral resolution of `H`.
    pub resolution_error: f64,
    pub metric_residual: f64,
    /// `max |E⁺ − conj(E⁻)| / ρ`.
    pub pairing_error: f64,
    pub passed: bool,
}

/// Checks the complex-pair orthogonality and completeness relations with
/// left vectors `⟨L_n| = ⟨R_n| V`.
///
/// With these left vectors the partner of `|R⁺_n⟩` is `⟨L⁻_n|`, so the
/// relations are evaluated after relabeling by the pairing in `cls`.
pub fn pair_completeness_check(es: &EigenSystem, cls: &SpectrumClass, tol: f64) -> Result<PairCompleteness> {
    if cls.kind != SpectrumKind::ConjugatePairs {
        return Err(Error::Precondition(
            "pair completeness needs a complex-pair spectrum".into(),
        ));
    }
    let itw = build_metric(es, cls)?;
    let v = &itw.v;
    let n = es.dim();
    let h = es.reconstruct();
    let bra = |k: usize| -> Vec<C64> {
        // components of ⟨R_k| V
        let r = es.right_vector(k);
        (0..n).map(|j| (0..n).map(|i| r[i].conj() * v[(i, j)]).sum()).collect()
    };
    let apply = |b: &[C64], k: usize| -> C64 { b.iter().zip(es.right_vector(k)).map(|(x, y)| x * y).sum() };
    let outer = |k: usize, b: &[C64]| -> ComplexMatrix {
        let r = es.right_vector(k);
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = r[i] * b[j];
            }
        }
        m
    };

    let lminus: Vec<Vec<C64>> = cls.pairs.iter().map(|&(_, m)| bra(m)).collect();
    let lplus: Vec<Vec<C64>> = cls.pairs.iter().map(|&(p, _)| bra(p)).collect();

    let mut cross: f64 = 0.0;
    let mut same: f64 = 0.0;
    for (a, _) in cls.pairs.iter().enumerate() {
        for (b, &(bp, bm)) in cls.pairs.iter().enumerate() {
            let delta = if a == b { 1.0 } else { 0.0 };
            cross = cross.max((apply(&lminus[a], bp) - delta).norm());
            cross = cross.max((apply(&lplus[a], bm) - delta).norm());
            same = same.max(apply(&lminus[a], bm).norm());
            same = same.max(apply(&lplus[a], bp).norm());
        }
    }

    let mut identity = ComplexMatrix::zeros(n);
    let mut resolution = ComplexMatrix::zeros(n);
    for (a, &(p, m)) in cls.pairs.iter().enumerate() {
        let t1 = outer(p, &lminus[a]);
        let t2 = outer(m, &lplus[a]);
        identity = &(&identity + &t1) + &t2;
        resolution = &(&resolution + &t1.scale(es.values[p])) + &t2.scale(es.values[m]);
    }
    for &k in &cls.real_indices {
        let t = outer(k, &bra(k));
        identity = &identity + &t;
        resolution = &resolution + &t.scale(es.values[k]);
    }
    let completeness_error = identity.distance(&ComplexMatrix::identity(n));
    let resolution_error = resolution.distance(&h) / h.norm_fro().max(f64::MIN_POSITIVE);
    let metric_residual = intertwining_residual(v, &h);
    let pairing_error = cls
        .pairs
        .iter()
        .map(|&(p, m)| (es.values[p] - es.values[m].conj()).norm())
        .fold(0.0, f64::max)
        / cls.scale.max(f64::MIN_POSITIVE);

    let passed = [
        cross,
        same,
        completeness_error,
        resolution_error,
        metric_residual,
        pairing_error,
    ]
    .iter()
    .all(|&e| e <= tol);
    Ok(PairCompleteness {
        cross_overlap_error: cross,
        same_overlap_error: same,
        completeness_error,
        resolution_error,
        metric_residual,
        pairing_error,
        passed,
    })
}

/// Rescales each right eigenvector so that `|⟨R_n|P|R_n⟩| = 1`.
///
/// Within the metric family this picks the `V` for which the `α_n` of `PV`
/// are `±1`, so that `(PV)² = I` whenever the P Gram matrix is diagonal.
/// Fails if the P Gram matrix is not diagonal (degenerate spectrum or `P`
/// not intertwining) or has a vanishing diagonal entry.
pub fn parity_adapted(es: &EigenSystem, p: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    let n = es.dim();
    let g = gram(es, p);
    let scale = g.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..n {
            if i != j && g[(i, j)].norm() > tol * scale {
                return Err(Error::Precondition(format!(
                    "⟨R_{i}|P|R_{j}⟩ = {} is not zero; P Gram matrix is not diagonal",
                    g[(i, j)]
                )));
            }
        }
    }
    let factors = (0..n)
        .map(|k| {
            let r = es.right_vector(k);
            let d = sandwich(&r, p, &r).norm();
            if d <= tol * scale {
                Err(Error::Precondition(format!("⟨R_{k}|P|R_{k}⟩ vanishes")))
            } else {
                Ok(C64::new(d.powf(-0.5), 0.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(es.rescaled(&factors))
}

/// Eigensystem in the gauge where the η-corrected PT norm can be compared
/// with the V norm: PT phases fixed to `±1`, their signs aligned with
/// `⟨R_n|P|R_n⟩`, and the scale set by [`parity_adapted`].
///
/// `p` only needs to intertwine (`P H P⁻¹ = H†`); it does not have to be an
/// involution, so a parity carried through a non-unitary change of basis as
/// `S⁻¹† P S⁻¹` works as well.
pub fn parity_gauge(
    es: &EigenSystem,
    cls: &SpectrumClass,
    p: &ComplexMatrix,
    pt: &AntilinearOp,
    tol: f64,
) -> Result<(EigenSystem, PTPhases)> {
    let (phases, fixed) = fix_pt_phases(pt, es, cls, tol)?;
    let (phases, aligned) = align_pt_signs(pt, &phases, &fixed, p, tol)?;
    Ok((parity_adapted(&aligned, p, tol)?, phases))
}
