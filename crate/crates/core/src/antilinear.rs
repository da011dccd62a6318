//! Parity, time reversal and their product; intrinsic PT phases.
//!
//! An antilinear operator is stored as its linear part `u` together with a
//! conjugation flag, acting as `v ↦ u·conj(v)`. The operator product
//! `K·M` (conjugate after applying `M`) is `u = conj(M)`, see
//! [`AntilinearOp::conjugate_after`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, pauli, sandwich, vec_norm, ComplexMatrix, EigenSystem, C64};
use crate::spectra::{SpectrumClass, SpectrumKind};

/// Linear (`conjugates = false`) or antilinear operator `v ↦ u·conj(v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntilinearOp {
    pub u: ComplexMatrix,
    pub conjugates: bool,
}

impl AntilinearOp {
    pub fn linear(u: ComplexMatrix) -> Self {
        Self { u, conjugates: false }
    }

    /// `v ↦ u·conj(v)`, i.e. `U·K`.
    pub fn antilinear(u: ComplexMatrix) -> Self {
        Self { u, conjugates: true }
    }

    /// Plain complex conjugation `K`.
    pub fn complex_conjugation(dim: usize) -> Self {
        Self::antilinear(ComplexMatrix::identity(dim))
    }

    /// `K·M`: `v ↦ conj(M v)`.
    pub fn conjugate_after(m: &ComplexMatrix) -> Self {
        Self::antilinear(m.conj())
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        if self.conjugates {
            let c: Vec<C64> = v.iter().map(|z| z.conj()).collect();
            self.u.matvec(&c)
        } else {
            self.u.matvec(v)
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let u = if self.conjugates {
            &self.u * &other.u.conj()
        } else {
            &self.u * &other.u
        };
        Self {
            u,
            conjugates: self.conjugates ^ other.conjugates,
        }
    }

    pub fn inverse(&self, tol: f64) -> Result<Self> {
        let inv = self.u.inverse(tol)?;
        Ok(Self {
            u: if self.conjugates { inv.conj() } else { inv },
            conjugates: self.conjugates,
        })
    }

    /// `A·A` expressed as a linear matrix (`u·conj(u)` for antilinear `A`).
    pub fn square(&self) -> ComplexMatrix {
        self.compose(self).u
    }

    pub fn is_involution(&self, tol: f64) -> bool {
        self.square().approx_eq(&ComplexMatrix::identity(self.dim()), tol)
    }

    /// The matrix of `A H A⁻¹`.
    pub fn conjugate_operator(&self, h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
        let uinv = self.u.inverse(tol)?;
        let inner = if self.conjugates { h.conj() } else { h.clone() };
        Ok(&(&self.u * &inner) * &uinv)
    }

    /// `S A S⁻¹`.
    pub fn transformed(&self, s: &ComplexMatrix, tol: f64) -> Result<Self> {
        let sinv = s.inverse(tol)?;
        Ok(Self::linear(s.clone()).compose(self).compose(&Self::linear(sinv)))
    }

    /// `‖A·C − C·A‖_F` for a linear `C`, computed on the linear parts.
    pub fn commutator_residual(&self, c: &ComplexMatrix) -> f64 {
        let cu = if self.conjugates { c.conj() } else { c.clone() };
        (&self.u * &cu).distance(&(c * &self.u))
    }
}

/// Parity, time reversal and PT for one Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PTFrame {
    pub p: ComplexMatrix,
    pub t: AntilinearOp,
    pub pt: AntilinearOp,
}

impl PTFrame {
    /// Validates `P² = I`, `P = P†`, `T² = I`, `T` antilinear with unitary
    /// linear part, and `[P, T] = 0`.
    pub fn new(p: ComplexMatrix, t: AntilinearOp, tol: f64) -> Result<Self> {
        let n = p.dim();
        if t.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.dim(),
            });
        }
        let id = ComplexMatrix::identity(n);
        if !(&p * &p).approx_eq(&id, tol) {
            return Err(Error::InvalidFrame("P² ≠ I".into()));
        }
        if !p.is_hermitian(tol) {
            return Err(Error::InvalidFrame("P ≠ P†".into()));
        }
        if !t.conjugates {
            return Err(Error::InvalidFrame("T must be antilinear".into()));
        }
        if !(&t.u * &t.u.adjoint()).approx_eq(&id, tol) {
            return Err(Error::InvalidFrame("linear part of T is not unitary".into()));
        }
        if !t.is_involution(tol) {
            return Err(Error::InvalidFrame("T² ≠ I".into()));
        }
        let pop = AntilinearOp::linear(p.clone());
        if pop.compose(&t).u.distance(&t.compose(&pop).u) > tol * (n as f64).max(1.0) {
            return Err(Error::InvalidFrame("[P, T] ≠ 0".into()));
        }
        let pt = pop.compose(&t);
        Ok(Self { p, t, pt })
    }

    /// `P = I`, `T = K`: the frame for real Hamiltonians with no parity.
    pub fn conjugation_only(dim: usize) -> Self {
        let t = AntilinearOp::complex_conjugation(dim);
        Self {
            p: ComplexMatrix::identity(dim),
            pt: t.clone(),
            t,
        }
    }
}

/// Two-level frame `P = σ·p`, `T = K σ2 (σ·t)` with real unit vectors
/// `p ⟂ t`.
pub fn make_two_level_frame(pvec: [f64; 3], tvec: [f64; 3], tol: f64) -> Result<PTFrame> {
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    if (dot(pvec, pvec) - 1.0).abs() > tol {
        return Err(Error::InvalidFrame(format!("|p|² = {} ≠ 1", dot(pvec, pvec))));
    }
    if (dot(tvec, tvec) - 1.0).abs() > tol {
        return Err(Error::InvalidFrame(format!("|t|² = {} ≠ 1", dot(tvec, tvec))));
    }
    if dot(pvec, tvec).abs() > tol {
        return Err(Error::InvalidFrame(format!("p·t = {} ≠ 0", dot(pvec, tvec))));
    }
    let p = pauli::dot_real(pvec);
    let t = AntilinearOp::conjugate_after(&(&pauli::sigma2() * &pauli::dot_real(tvec)));
    PTFrame::new(p, t, tol)
}

/// PT eigenvalue of `state`: the component of `PT·state` along `state`.
///
/// The returned phase has unit modulus. Fails with
/// [`Error::NotPTEigenstate`] if `PT·state` leaves the ray by more than `tol`
/// (relative), which is the expected outcome for complex-pair eigenstates.
pub fn pt_eigenphase(pt: &AntilinearOp, state: &[C64], tol: f64) -> Result<C64> {
    let norm2 = inner(state, state).re;
    if norm2 == 0.0 {
        return Err(Error::Precondition("zero state has no PT phase".into()));
    }
    let image = pt.apply(state);
    let eta = inner(state, &image) / norm2;
    let resid: Vec<C64> = image.iter().zip(state).map(|(w, v)| w - eta * v).collect();
    let residual = vec_norm(&resid) / norm2.sqrt();
    if residual > tol || eta.norm() == 0.0 {
        return Err(Error::NotPTEigenstate { residual });
    }
    Ok(eta / eta.norm())
}

/// Intrinsic PT phases after fixing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PTPhases {
    /// PT eigenvalue of each (rephased) eigenvector, `±1`.
    pub eta: Vec<C64>,
    /// PT eigenvalue before rephasing.
    pub raw_eta: Vec<C64>,
    /// Factor applied to each right eigenvector.
    pub phase_fix: Vec<C64>,
    /// Degenerate eigenvalue clusters whose basis was replaced by a PT
    /// eigenbasis.
    pub rebased: Vec<Vec<usize>>,
}

/// Rephases real-spectrum eigenvectors so every PT eigenvalue is `±1`.
///
/// A state with `η = e^{iα}` is multiplied by `e^{iα/2}`, which sends `η` to
/// `+1`; states already at `η = −1` are left alone. Left vectors are rescaled
/// so biorthonormality holds. Inside a degenerate eigenvalue cluster whose
/// vectors are not individually PT eigenstates, PT is diagonalized on the
/// cluster first and the cluster is listed in [`PTPhases::rebased`].
pub fn fix_pt_phases(
    pt: &AntilinearOp,
    es: &EigenSystem,
    cls: &SpectrumClass,
    tol: f64,
) -> Result<(PTPhases, EigenSystem)> {
    if cls.kind != SpectrumKind::AllReal {
        return Err(Error::Precondition(
            "PT phases are fixed only for an all-real spectrum".into(),
        ));
    }
    if !pt.conjugates {
        return Err(Error::Precondition("PT must be antilinear".into()));
    }
    let (es, rebased) = rebase_degenerate_clusters(pt, es, cls, tol)?;

    let n = es.dim();
    let mut raw_eta = Vec::with_capacity(n);
    let mut phase_fix = Vec::with_capacity(n);
    for k in 0..n {
        let eta = pt_eigenphase(pt, &es.right_vector(k), tol)?;
        raw_eta.push(eta);
        let already_real = (eta - C64::new(1.0, 0.0)).norm() <= tol || (eta + C64::new(1.0, 0.0)).norm() <= tol;
        phase_fix.push(if already_real {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, eta.arg() / 2.0)
        });
    }
    let fixed = es.rescaled(&phase_fix);
    let eta = (0..n)
        .map(|k| pt_eigenphase(pt, &fixed.right_vector(k), tol))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        PTPhases {
            eta,
            raw_eta,
            phase_fix,
            rebased,
        },
        fixed,
    ))
}

/// Chooses the sign of each `η_n` (multiplying the state by `i` flips it) so
/// that `η_n⁻¹ ⟨R_n|P|R_n⟩ > 0`.
///
/// Requires each `⟨R_n|P|R_n⟩` to be real and nonzero within `tol`.
pub fn align_pt_signs(
    pt: &AntilinearOp,
    phases: &PTPhases,
    es: &EigenSystem,
    p: &ComplexMatrix,
    tol: f64,
) -> Result<(PTPhases, EigenSystem)> {
    let n = es.dim();
    let mut flips = Vec::with_capacity(n);
    for k in 0..n {
        let r = es.right_vector(k);
        let g = sandwich(&r, p, &r);
        let scale = inner(&r, &r).re * p.norm_2();
        if g.norm() <= tol * scale {
            return Err(Error::Precondition(format!(
                "⟨R_{k}|P|R_{k}⟩ vanishes; sign of η_{k} is undetermined"
            )));
        }
        if g.im.abs() > tol.sqrt() * g.norm() {
            return Err(Error::Precondition(format!("⟨R_{k}|P|R_{k}⟩ = {g} is not real")));
        }
        let want_positive = g.re > 0.0;
        let is_positive = phases.eta[k].re > 0.0;
        flips.push(if want_positive == is_positive {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 1.0)
        });
    }
    let aligned = es.rescaled(&flips);
    let eta = (0..n)
        .map(|k| pt_eigenphase(pt, &aligned.right_vector(k), tol))
        .collect::<Result<Vec<_>>>()?;
    let phase_fix = phases.phase_fix.iter().zip(&flips).map(|(a, b)| a * b).collect();
    Ok((
        PTPhases {
            eta,
            raw_eta: phases.raw_eta.clone(),
            phase_fix,
            rebased: phases.rebased.clone(),
        },
        aligned,
    ))
}

/// `η_n⁻¹ ⟨R_n| P |R_m⟩`.
pub fn pt_conjugate_inner(p: &ComplexMatrix, phases: &PTPhases, n: usize, m: usize, es: &EigenSystem) -> C64 {
    sandwich(&es.right_vector(n), p, &es.right_vector(m)) / phases.eta[n]
}

/// Full PT-conjugate Gram matrix, entry `(n, m)` = [`pt_conjugate_inner`].
pub fn pt_gram(p: &ComplexMatrix, phases: &PTPhases, es: &EigenSystem) -> ComplexMatrix {
    let n = es.dim();
    let mut g = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = pt_conjugate_inner(p, phases, i, j, es);
        }
    }
    g
}

/// Replaces the basis of each degenerate real cluster by PT eigenvectors with
/// `η = +1` whenever the computed vectors are not PT eigenstates already.
fn rebase_degenerate_clusters(
    pt: &AntilinearOp,
    es: &EigenSystem,
    cls: &SpectrumClass,
    tol: f64,
) -> Result<(EigenSystem, Vec<Vec<usize>>)> {
    let n = es.dim();
    let gap = cls.tol * cls.scale.max(f64::MIN_POSITIVE);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(c) if (es.values[*c.last().unwrap()] - es.values[k]).norm() <= gap.max(tol * cls.scale) => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let mut right = es.right.clone();
    let mut rebased = Vec::new();
    for cluster in clusters.into_iter().filter(|c| c.len() > 1) {
        let all_eigen = cluster
            .iter()
            .all(|&k| pt_eigenphase(pt, &es.right_vector(k), tol).is_ok());
        if all_eigen {
            continue;
        }
        // PT restricted to the cluster: PT(B c) = B · M · conj(c)
        let k = cluster.len();
        let cols: Vec<Vec<C64>> = cluster.iter().map(|&j| es.right_vector(j)).collect();
        let images: Vec<Vec<C64>> = cols.iter().map(|b| pt.apply(b)).collect();
        let mut m = vec![vec![C64::new(0.0, 0.0); k]; k];
        for (a, &row) in cluster.iter().enumerate() {
            let l = es.left_row(row);
            for (b, img) in images.iter().enumerate() {
                m[a][b] = l.iter().zip(img).map(|(x, y)| x * y).sum();
            }
        }
        // fixed points of c ↦ M conj(c): w + M conj(w) for w = e_j and i e_j
        let mut candidates: Vec<Vec<C64>> = Vec::with_capacity(2 * k);
        for j in 0..k {
            for w in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut c: Vec<C64> = (0..k).map(|a| m[a][j] * w.conj()).collect();
                c[j] += w;
                candidates.push(c);
            }
        }
        let basis = pick_independent(candidates, k)
            .ok_or_else(|| Error::Precondition("PT does not act as an involution on a degenerate cluster".into()))?;
        for (slot, coeffs) in cluster.iter().zip(basis) {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (b, col) in cols.iter().enumerate() {
                for i in 0..n {
                    v[i] += col[i] * coeffs[b];
                }
            }
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let v: Vec<C64> = v.into_iter().map(|z| z / max).collect();
            right.set_column(*slot, &v);
        }
        rebased.push(cluster);
    }
    if rebased.is_empty() {
        Ok((es.clone(), rebased))
    } else {
        Ok((es.with_right(right, tol)?, rebased))
    }
}

/// Greedy pivoted Gram-Schmidt; returns `k` original vectors spanning a
/// `k`-dimensional space, or `None`.
fn pick_independent(mut candidates: Vec<Vec<C64>>, k: usize) -> Option<Vec<Vec<C64>>> {
    let mut chosen = Vec::with_capacity(k);
    let mut ortho: Vec<Vec<C64>> = Vec::with_capacity(k);
    let scale = candidates.iter().map(|c| vec_norm(c)).fold(0.0, f64::max);
    while chosen.len() < k {
        let residuals: Vec<Vec<C64>> = candidates
            .iter()
            .map(|c| {
                let mut r = c.clone();
                for q in &ortho {
                    let d = inner(q, &r);
                    for (x, y) in r.iter_mut().zip(q) {
                        *x -= d * y;
                    }
                }
                r
            })
            .collect();
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, vec_norm(r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if norm <= 1e-8 * scale {
            return None;
        }
        ortho.push(residuals[best].iter().map(|z| z / norm).collect());
        chosen.push(candidates.swap_remove(best));
    }
    Some(chosen)
}
