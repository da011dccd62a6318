//! The two-level model `H = α σ1 + i β σ2` in closed form.
//!
//! Everything here is evaluated from explicit formulas, independently of the
//! eigensolver, so it can serve as an oracle for the generic pipeline.

use serde::{Deserialize, Serialize};

use crate::antilinear::{make_two_level_frame, AntilinearOp, PTFrame};
use crate::cpt::build_pv;
use crate::error::{Error, Result};
use crate::intertwiner::{build_metric, gram};
use crate::linalg::{c64, eigendecompose, inner, pauli, ComplexMatrix, C64};
use crate::spectra::classify;

/// Relative gap `|α − β| ≤ EXCEPTIONAL_GAP · (α + β)` marks the Jordan point.
pub const EXCEPTIONAL_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    RealSpectrum,
    ComplexPair,
    Exceptional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelModel {
    pub alpha: f64,
    pub beta: f64,
}

impl TwoLevelModel {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 || alpha + beta == 0.0 {
            return Err(Error::Precondition(format!(
                "two-level model needs α, β ≥ 0 and not both zero, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn phase(&self) -> Phase {
        if (self.alpha - self.beta).abs() <= EXCEPTIONAL_GAP * (self.alpha + self.beta) {
            Phase::Exceptional
        } else if self.alpha > self.beta {
            Phase::RealSpectrum
        } else {
            Phase::ComplexPair
        }
    }

    /// `[[0, α+β], [α−β, 0]]`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        hamiltonian(self)
    }

    /// `P = σ1`, `T = K i σ1`, so `PT = K i`.
    pub fn frame(&self) -> PTFrame {
        make_two_level_frame([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1e-14).expect("standard frame is valid")
    }
}

pub fn hamiltonian(m: &TwoLevelModel) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, m.alpha + m.beta], vec![m.alpha - m.beta, 0.0]]).expect("2×2 real rows")
}

/// `S H S⁻¹` for `S = cosh θ − σ3 sinh θ` and arbitrary `θ`:
/// `(α cosh 2θ − β sinh 2θ) σ1 + (β cosh 2θ − α sinh 2θ) i σ2`.
pub fn similarity_transformed(m: &TwoLevelModel, theta: f64) -> ComplexMatrix {
    let (ch, sh) = ((2.0 * theta).cosh(), (2.0 * theta).sinh());
    let a = m.alpha * ch - m.beta * sh;
    let b = m.beta * ch - m.alpha * sh;
    &pauli::sigma1().scale_real(a) + &pauli::sigma2().scale(c64(0.0, b))
}

/// `cosh θ − σ3 sinh θ`.
pub fn boost(theta: f64) -> ComplexMatrix {
    &ComplexMatrix::identity(2).scale_real(theta.cosh()) - &pauli::sigma3().scale_real(theta.sinh())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub theta: f64,
    pub cosh_2theta: f64,
    pub sinh_2theta: f64,
    pub s: ComplexMatrix,
    /// `S H S⁻¹ = √(α² − β²) σ1`.
    pub hermitian_form: ComplexMatrix,
    pub v: ComplexMatrix,
    pub v_inv: ComplexMatrix,
    /// `N₊ = N₋ = 2 √(α² − β²)`.
    pub normalization: f64,
    pub u_plus: [f64; 2],
    pub u_minus: [f64; 2],
    /// `(+√(α² − β²), −√(α² − β²))`, matching `u_plus`, `u_minus`.
    pub energies: [f64; 2],
    /// `u₋† u₊ = β / √(α² − β²)`.
    pub dirac_overlap: f64,
    /// `u†σ1u` for `u₊`, `u₋`: `(+1, −1)`.
    pub parity_norms: [f64; 2],
    /// `P V = σ1 V`, which squares to the identity.
    pub pv: ComplexMatrix,
}

pub fn closed_forms(m: &TwoLevelModel) -> Result<ClosedForms> {
    if m.phase() != Phase::RealSpectrum {
        return Err(Error::NotRealPhase {
            alpha: m.alpha,
            beta: m.beta,
        });
    }
    let (a, b) = (m.alpha, m.beta);
    let root = ((a - b) * (a + b)).sqrt();
    let theta = 0.5 * (b / a).atanh();
    let cosh_2theta = a / root;
    let sinh_2theta = b / root;
    let s = boost(theta);
    let sigma3 = pauli::sigma3();
    let id = ComplexMatrix::identity(2);
    let v = &id.scale_real(cosh_2theta) - &sigma3.scale_real(sinh_2theta);
    let v_inv = &id.scale_real(cosh_2theta) + &sigma3.scale_real(sinh_2theta);
    let normalization = 2.0 * root;
    let k = normalization.sqrt();
    let u_plus = [(a + b).sqrt() / k, (a - b).sqrt() / k];
    let u_minus = [(a + b).sqrt() / k, -(a - b).sqrt() / k];
    Ok(ClosedForms {
        theta,
        cosh_2theta,
        sinh_2theta,
        s,
        hermitian_form: pauli::sigma1().scale_real(root),
        pv: &pauli::sigma1() * &v,
        v,
        v_inv,
        normalization,
        u_plus,
        u_minus,
        energies: [root, -root],
        dirac_overlap: b / root,
        parity_norms: [1.0, -1.0],
    })
}

/// `σ0 h0 + σ·(h_R + i h_I)`.
pub fn pauli_hamiltonian(h0: C64, h_real: [f64; 3], h_imag: [f64; 3]) -> ComplexMatrix {
    let h = [
        c64(h_real[0], h_imag[0]),
        c64(h_real[1], h_imag[1]),
        c64(h_real[2], h_imag[2]),
    ];
    &ComplexMatrix::identity(2).scale(h0) + &pauli::dot(h)
}

/// The PT-symmetry conditions on `H = σ0 h0 + σ·(h_R + i h_I)` for the frame
/// `P = σ·p`, `T = K σ2 σ·t`:
/// `Im h0 = 0`, `h_I ⟂ p`, `h_I ⟂ t`, and `h_R` lying in the span of `p`, `t`.
///
/// Fails only on an invalid frame.
pub fn pt_symmetry_conditions(
    h0: C64,
    h_real: [f64; 3],
    h_imag: [f64; 3],
    pvec: [f64; 3],
    tvec: [f64; 3],
    tol: f64,
) -> Result<bool> {
    make_two_level_frame(pvec, tvec, tol)?;
    let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let scale = (h0.norm_sqr() + dot(h_real, h_real) + dot(h_imag, h_imag))
        .sqrt()
        .max(1.0);
    let eps = tol * scale;

    let (ip, it) = (dot(h_imag, pvec), dot(h_imag, tvec));
    let (rp, rt) = (dot(h_real, pvec), dot(h_real, tvec));
    let out_of_plane: f64 = (0..3)
        .map(|k| (rp * pvec[k] + rt * tvec[k] - h_real[k]).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(h0.im.abs() <= eps && ip.abs() <= eps && it.abs() <= eps && out_of_plane <= eps)
}

/// Largest deviations between the generic pipeline and [`closed_forms`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineComparison {
    pub energies: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub v: f64,
    pub dirac_overlap: f64,
    pub v_gram: f64,
    pub parity_norms: f64,
    pub pv: f64,
    pub max_error: f64,
}

/// Runs eigendecompose → classify → build_metric → v_gram → build_pv on
/// `H(α, β)` and compares every quantity with its closed form.
///
/// The generic eigenvectors are matched to `u₊`, `u₋` by largest overlap and
/// rescaled onto them before the metric is built, since both eigenvector
/// normalization and the metric are fixed only up to that choice.
pub fn compare_with_pipeline(m: &TwoLevelModel, tol: f64) -> Result<PipelineComparison> {
    let cf = closed_forms(m)?;
    let h = m.hamiltonian();
    let es = eigendecompose(&h, tol)?;
    let targets = [
        vec![c64(cf.u_plus[0], 0.0), c64(cf.u_plus[1], 0.0)],
        vec![c64(cf.u_minus[0], 0.0), c64(cf.u_minus[1], 0.0)],
    ];

    let mut order = [0usize; 2];
    let mut factors = [c64(1.0, 0.0); 2];
    for (k, target) in targets.iter().enumerate() {
        let (best, _) = (0..2)
            .map(|j| {
                let r = es.right_vector(j);
                (j, inner(&r, target).norm() / inner(&r, &r).re.sqrt())
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("two columns");
        let r = es.right_vector(best);
        order[k] = best;
        factors[best] = inner(&r, target) / inner(&r, &r);
    }
    if order[0] == order[1] {
        return Err(Error::Precondition(
            "eigenvectors could not be matched to u₊, u₋".into(),
        ));
    }
    let es = es.rescaled(&factors);
    let cls = classify(&es, tol)?;
    let itw = build_metric(&es, &cls)?;
    let p = pauli::sigma1();
    let pv = build_pv(&es, &p, &itw.v, tol)?;

    let energies = (0..2)
        .map(|k| (es.values[order[k]] - c64(cf.energies[k], 0.0)).norm())
        .fold(0.0, f64::max);
    let vec_err = |k: usize| {
        let r = es.right_vector(order[k]);
        r.iter()
            .zip(&targets[k])
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    };
    let dirac = gram(&es, &ComplexMatrix::identity(2));
    let vg = gram(&es, &itw.v);
    let pg = gram(&es, &p);
    let (ip, im) = (order[0], order[1]);
    let v_gram_err = (vg[(ip, ip)] - 1.0)
        .norm()
        .max((vg[(im, im)] - 1.0).norm())
        .max(vg[(ip, im)].norm())
        .max(vg[(im, ip)].norm());
    let parity_norms = (pg[(ip, ip)] - cf.parity_norms[0])
        .norm()
        .max((pg[(im, im)] - cf.parity_norms[1]).norm())
        .max(pg[(ip, im)].norm())
        .max(pg[(im, ip)].norm());

    let mut out = PipelineComparison {
        energies,
        u_plus: vec_err(0),
        u_minus: vec_err(1),
        v: itw.v.distance(&cf.v),
        dirac_overlap: (dirac[(im, ip)] - cf.dirac_overlap).norm(),
        v_gram: v_gram_err,
        parity_norms,
        pv: pv.matrix.distance(&cf.pv),
        max_error: 0.0,
    };
    out.max_error = [
        out.energies,
        out.u_plus,
        out.u_minus,
        out.v,
        out.dirac_overlap,
        out.v_gram,
        out.parity_norms,
        out.pv,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(out)
}

/// `PT` of the standard frame as an [`AntilinearOp`]: `v ↦ −i conj(v)`.
pub fn standard_pt() -> AntilinearOp {
    AntilinearOp::antilinear(ComplexMatrix::identity(2).scale(c64(0.0, -1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::antilinear_symmetry_check;

    fn m(a: f64, b: f64) -> TwoLevelModel {
        TwoLevelModel::new(a, b).unwrap()
    }

    #[test]
    fn hamiltonians() {
        assert_eq!(
            m(5.0, 3.0).hamiltonian(),
            ComplexMatrix::from_real_rows(&[vec![0.0, 8.0], vec![2.0, 0.0]]).unwrap()
        );
        assert_eq!(
            m(1.0, 1.0).hamiltonian(),
            ComplexMatrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap()
        );
        assert_eq!(m(1.0, 0.0).hamiltonian(), pauli::sigma1());
        // α σ1 + i β σ2
        let direct = &pauli::sigma1().scale_real(5.0) + &pauli::sigma2().scale(c64(0.0, 3.0));
        assert!(direct.approx_eq(&m(5.0, 3.0).hamiltonian(), 1e-15));
    }

    #[test]
    fn phases() {
        assert_eq!(m(5.0, 3.0).phase(), Phase::RealSpectrum);
        assert_eq!(m(3.0, 5.0).phase(), Phase::ComplexPair);
        assert_eq!(m(2.0, 2.0).phase(), Phase::Exceptional);
        assert_eq!(m(1.0, 1.0 + 1e-10).phase(), Phase::Exceptional);
        assert!(TwoLevelModel::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn closed_forms_at_five_three() {
        let cf = closed_forms(&m(5.0, 3.0)).unwrap();
        assert_eq!(cf.energies, [4.0, -4.0]);
        assert!((cf.cosh_2theta - 1.25).abs() < 1e-15);
        assert!((cf.sinh_2theta - 0.75).abs() < 1e-15);
        assert!(cf.v.approx_eq(&ComplexMatrix::from_real_diag(&[0.5, 2.0]), 1e-15));
        assert_eq!(cf.normalization, 8.0);
        assert!((cf.u_plus[0] - 1.0).abs() < 1e-15 && (cf.u_plus[1] - 0.5).abs() < 1e-15);
        assert!((cf.u_minus[1] + 0.5).abs() < 1e-15);
        assert!((cf.dirac_overlap - 0.75).abs() < 1e-15);
        assert!((&cf.pv * &cf.pv).approx_eq(&ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn similarity_identities() {
        let model = m(5.0, 3.0);
        let cf = closed_forms(&model).unwrap();
        let h = model.hamiltonian();
        let sinv = cf.s.inverse(1e-12).unwrap();
        let shs = &(&cf.s * &h) * &sinv;
        assert!(shs.approx_eq(&pauli::sigma1().scale_real(4.0), 1e-14));
        assert!(shs.approx_eq(&similarity_transformed(&model, cf.theta), 1e-14));
        assert!((&cf.s.adjoint() * &cf.s).approx_eq(&cf.v, 1e-14));
        assert!((&cf.v * &cf.v_inv).approx_eq(&ComplexMatrix::identity(2), 1e-14));
        let vhv = &(&cf.v * &h) * &cf.v_inv;
        assert!(vhv.approx_eq(&h.adjoint(), 1e-14));
        // the general-θ formula agrees with direct conjugation away from the Hermitian point
        for theta in [-0.4, 0.1, 0.9] {
            let s = boost(theta);
            let direct = &(&s * &h) * &s.inverse(1e-12).unwrap();
            assert!(direct.approx_eq(&similarity_transformed(&model, theta), 1e-13));
        }
    }

    #[test]
    fn hermitian_limit() {
        let cf = closed_forms(&m(2.0, 0.0)).unwrap();
        assert_eq!(cf.theta, 0.0);
        assert!(cf.s.approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(cf.v.approx_eq(&ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn closed_forms_need_real_phase() {
        assert!(matches!(closed_forms(&m(3.0, 5.0)), Err(Error::NotRealPhase { .. })));
        assert!(matches!(closed_forms(&m(2.0, 2.0)), Err(Error::NotRealPhase { .. })));
    }

    #[test]
    fn pipeline_matches_closed_forms() {
        for (a, b) in [(5.0, 3.0), (1.0, 0.0), (10.0, 9.9), (0.3, 0.01)] {
            let cmp = compare_with_pipeline(&m(a, b), 1e-10).unwrap();
            assert!(cmp.max_error < 1e-9, "({a}, {b}): {cmp:?}");
        }
    }

    #[test]
    fn symmetry_conditions() {
        let (p, t) = ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        let zero = c64(0.0, 0.0);
        assert!(pt_symmetry_conditions(zero, [5.0, 0.0, 0.0], [0.0, 3.0, 0.0], p, t, 1e-12).unwrap());
        assert!(!pt_symmetry_conditions(zero, [5.0, 0.0, 0.0], [3.0, 0.0, 0.0], p, t, 1e-12).unwrap());
        assert!(!pt_symmetry_conditions(c64(0.0, 0.2), [5.0, 0.0, 0.0], [0.0, 3.0, 0.0], p, t, 1e-12).unwrap());
        assert!(pt_symmetry_conditions(zero, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], p, [0.0, 1.0, 0.0], 1e-12).is_ok());
        assert!(pt_symmetry_conditions(zero, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], p, [1.0, 0.0, 0.0], 1e-12).is_err());
        // the model itself is in the frame's standard form
        let h = pauli_hamiltonian(zero, [5.0, 0.0, 0.0], [0.0, 3.0, 0.0]);
        assert!(h.approx_eq(&m(5.0, 3.0).hamiltonian(), 1e-15));
        assert!(antilinear_symmetry_check(&h, &m(5.0, 3.0).frame().pt, 1e-12));
        assert!(m(5.0, 3.0).frame().pt.u.approx_eq(&standard_pt().u, 1e-15));
    }
}
