//! Real / complex-conjugate-pair / exceptional classification of a spectrum.

use serde::{Deserialize, Serialize};

use crate::antilinear::AntilinearOp;
use crate::error::{Error, Result};
use crate::linalg::{eigendecompose_unchecked, ComplexMatrix, EigenSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    AllReal,
    ConjugatePairs,
    Exceptional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumClass {
    pub kind: SpectrumKind,
    /// `(n⁺, n⁻)` with `Im E(n⁺) > 0` and `E(n⁺) ≈ conj(E(n⁻))`.
    pub pairs: Vec<(usize, usize)>,
    pub real_indices: Vec<usize>,
    /// Spectral radius used to make `tol` relative.
    pub scale: f64,
    pub tol: f64,
}

impl SpectrumClass {
    /// Tag for a near-defective Hamiltonian, as reported by the caller.
    pub fn exceptional(scale: f64, tol: f64) -> Self {
        Self {
            kind: SpectrumKind::Exceptional,
            pairs: Vec::new(),
            real_indices: Vec::new(),
            scale,
            tol,
        }
    }

    /// Index of the conjugate partner of `n`, if `n` belongs to a pair.
    pub fn partner(&self, n: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(p, m)| {
            if p == n {
                Some(m)
            } else if m == n {
                Some(p)
            } else {
                None
            }
        })
    }
}

/// Classifies the eigenvalues of `es`.
///
/// An eigenvalue is real when `|Im E| ≤ tol · ρ` (ρ = spectral radius, or 1
/// for the zero matrix). Non-real eigenvalues are matched greedily, in
/// canonical order, to the nearest unmatched conjugate; a best match further
/// than `tol · ρ` means the spectrum cannot come from an antilinear symmetry.
pub fn classify(es: &EigenSystem, tol: f64) -> Result<SpectrumClass> {
    let rho = es.spectral_radius();
    let scale = if rho > 0.0 { rho } else { 1.0 };
    let eps = tol * scale;

    let mut real_indices = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (k, e) in es.values.iter().enumerate() {
        if e.im.abs() <= eps {
            real_indices.push(k);
        } else if e.im > 0.0 {
            upper.push(k);
        } else {
            lower.push(k);
        }
    }

    let mut taken = vec![false; lower.len()];
    let mut pairs = Vec::with_capacity(upper.len());
    for &k in &upper {
        let target = es.values[k].conj();
        let best = lower
            .iter()
            .enumerate()
            .filter(|(j, _)| !taken[*j])
            .map(|(j, &m)| (j, m, (es.values[m] - target).norm()))
            .min_by(|a, b| a.2.total_cmp(&b.2));
        match best {
            Some((j, m, d)) if d <= eps => {
                taken[j] = true;
                pairs.push((k, m));
            }
            _ => {
                return Err(Error::UnpairedComplexEigenvalue {
                    index: k,
                    value: es.values[k],
                })
            }
        }
    }
    if let Some(j) = taken.iter().position(|t| !t) {
        let k = lower[j];
        return Err(Error::UnpairedComplexEigenvalue {
            index: k,
            value: es.values[k],
        });
    }

    let kind = if pairs.is_empty() {
        SpectrumKind::AllReal
    } else {
        SpectrumKind::ConjugatePairs
    };
    Ok(SpectrumClass {
        kind,
        pairs,
        real_indices,
        scale,
        tol,
    })
}

/// True when the eigenvector matrix of `h` has condition number above `1/tol`.
pub fn detect_exceptional(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(eigenvector_condition(h, tol)? > 1.0 / tol)
}

/// Condition number of the canonical right-eigenvector matrix of `h`.
pub fn eigenvector_condition(h: &ComplexMatrix, tol: f64) -> Result<f64> {
    Ok(eigendecompose_unchecked(h, tol)?.condition)
}

/// `‖A H A⁻¹ − H‖ / ‖H‖`.
pub fn antilinear_symmetry_residual(h: &ComplexMatrix, a: &AntilinearOp, tol: f64) -> Result<f64> {
    let conj = a.conjugate_operator(h, tol)?;
    Ok(conj.distance(h) / h.norm_fro().max(f64::MIN_POSITIVE))
}

/// True when `A H A⁻¹ = H` within `tol · ‖H‖`. A singular `A` never passes.
pub fn antilinear_symmetry_check(h: &ComplexMatrix, a: &AntilinearOp, tol: f64) -> bool {
    antilinear_symmetry_residual(h, a, tol).is_ok_and(|r| r <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, eigendecompose, DEFAULT_TOL};

    fn real(rows: &[[f64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
    }

    #[test]
    fn real_phase_is_all_real() {
        let es = eigendecompose(&real(&[[0.0, 8.0], [2.0, 0.0]]), DEFAULT_TOL).unwrap();
        let cls = classify(&es, DEFAULT_TOL).unwrap();
        assert_eq!(cls.kind, SpectrumKind::AllReal);
        assert_eq!(cls.real_indices, vec![0, 1]);
        assert!(cls.pairs.is_empty());
    }

    #[test]
    fn complex_phase_has_one_pair() {
        let es = eigendecompose(&real(&[[0.0, 8.0], [-2.0, 0.0]]), DEFAULT_TOL).unwrap();
        let cls = classify(&es, DEFAULT_TOL).unwrap();
        assert_eq!(cls.kind, SpectrumKind::ConjugatePairs);
        assert_eq!(cls.pairs, vec![(0, 1)]);
        assert!(es.values[0].im > 0.0);
        assert_eq!(cls.partner(1), Some(0));
    }

    #[test]
    fn lone_complex_eigenvalue_is_rejected() {
        let h = ComplexMatrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 1.0)]);
        let es = eigendecompose(&h, DEFAULT_TOL).unwrap();
        assert!(matches!(
            classify(&es, DEFAULT_TOL),
            Err(Error::UnpairedComplexEigenvalue { .. })
        ));
    }

    #[test]
    fn degenerate_real_eigenvalues_are_independent() {
        let es = eigendecompose(&ComplexMatrix::from_real_diag(&[3.0, 3.0, -1.0]), DEFAULT_TOL).unwrap();
        let cls = classify(&es, DEFAULT_TOL).unwrap();
        assert_eq!(cls.kind, SpectrumKind::AllReal);
        assert_eq!(cls.real_indices.len(), 3);
    }

    #[test]
    fn exceptional_detection() {
        assert!(detect_exceptional(&real(&[[0.0, 4.0], [0.0, 0.0]]), DEFAULT_TOL).unwrap());
        assert!(!detect_exceptional(&ComplexMatrix::identity(2), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn well_conditioned_real_phase() {
        // R = [[1, 1], [1/2, −1/2]] has singular values 1·√2 and (1/2)·√2
        let cond = eigenvector_condition(&real(&[[0.0, 8.0], [2.0, 0.0]]), DEFAULT_TOL).unwrap();
        assert!((cond - 2.0).abs() < 1e-12);
        assert!(!detect_exceptional(&real(&[[0.0, 8.0], [2.0, 0.0]]), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn symmetry_checks() {
        let h = real(&[[0.0, 8.0], [2.0, 0.0]]);
        let pt = AntilinearOp::antilinear(ComplexMatrix::identity(2).scale(c64(0.0, -1.0)));
        assert!(antilinear_symmetry_check(&h, &pt, 1e-12));
        assert!(antilinear_symmetry_check(
            &h,
            &AntilinearOp::complex_conjugation(2),
            1e-12
        ));
        let nonreal = ComplexMatrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 1.0)]);
        assert!(!antilinear_symmetry_check(
            &nonreal,
            &AntilinearOp::complex_conjugation(2),
            1e-12
        ));
    }
}
