//! Fock-space expansion of a position eigenstate and the divergence of its
//! norm.
//!
//! Writing `|x⟩ = Σ c_n |n⟩` and imposing `(a + a†)|x⟩ = x|x⟩` gives the
//! three-term recurrence `√(n−1) c_{n−2} + √n c_n = x c_{n−1}`. The scaled
//! coefficients `d_n = c_n √(n!) / c_0` obey `d_n = x d_{n−1} − (n−1) d_{n−2}`,
//! which stays in the rationals for rational `x` and is used for exact checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigendecompose, vec_norm, ComplexMatrix, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockExpansion {
    pub x: f64,
    pub c0: f64,
    /// `c_0 … c_nmax`.
    pub coeffs: Vec<f64>,
    /// `Σ_{k ≤ n} c_k²`.
    pub partial_norms: Vec<f64>,
}

impl FockExpansion {
    /// Largest `|√(n−1) c_{n−2} + √n c_n − x c_{n−1}|` over `n ≥ 1`, relative
    /// to the size of the terms (with `c_{−1} = 0`).
    pub fn recurrence_residual(&self) -> f64 {
        let c = &self.coeffs;
        (1..c.len())
            .map(|n| {
                let prev2 = if n >= 2 { c[n - 2] } else { 0.0 };
                let nf = n as f64;
                let lhs = (nf - 1.0).sqrt() * prev2 + nf.sqrt() * c[n];
                let rhs = self.x * c[n - 1];
                (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(self.c0.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficients by forward recurrence, `c_1 = x c_0` and
/// `c_n = (x c_{n−1} − √(n−1) c_{n−2}) / √n`.
pub fn expand_position_state(x: f64, c0: f64, nmax: usize) -> Result<FockExpansion> {
    if nmax < 2 {
        return Err(Error::Precondition(format!("nmax must be at least 2, got {nmax}")));
    }
    if !x.is_finite() || !c0.is_finite() {
        return Err(Error::Precondition("x and c0 must be finite".into()));
    }
    let mut coeffs = Vec::with_capacity(nmax + 1);
    coeffs.push(c0);
    coeffs.push(x * c0);
    for n in 2..=nmax {
        let nf = n as f64;
        let next = (x * coeffs[n - 1] - (nf - 1.0).sqrt() * coeffs[n - 2]) / nf.sqrt();
        coeffs.push(next);
    }
    let mut partial_norms = Vec::with_capacity(nmax + 1);
    let mut sum = 0.0;
    for (n, c) in coeffs.iter().enumerate() {
        sum += c * c;
        if !c.is_finite() || !sum.is_finite() {
            return Err(Error::Overflow { n });
        }
        partial_norms.push(sum);
    }
    Ok(FockExpansion {
        x,
        c0,
        coeffs,
        partial_norms,
    })
}

/// `d_n = c_n √(n!) / c_0` for `n = 0 … nmax`, exactly.
pub fn scaled_coefficients_exact(x: &BigRational, nmax: usize) -> Vec<BigRational> {
    let mut d = Vec::with_capacity(nmax + 1);
    d.push(BigRational::one());
    if nmax >= 1 {
        d.push(x.clone());
    }
    for n in 2..=nmax {
        let k = BigRational::from_integer(BigInt::from(n - 1));
        let next = x * &d[n - 1] - k * &d[n - 2];
        d.push(next);
    }
    d
}

/// `c_n² / c_0² = d_n² / n!` for `n = 0 … nmax`, exactly.
pub fn squared_coefficients_exact(x: &BigRational, nmax: usize) -> Vec<BigRational> {
    let mut factorial = BigInt::one();
    scaled_coefficients_exact(x, nmax)
        .into_iter()
        .enumerate()
        .map(|(n, d)| {
            if n > 0 {
                factorial *= BigInt::from(n);
            }
            &d * &d / BigRational::from_integer(factorial.clone())
        })
        .collect()
}

/// Exact rational for a finite `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Precondition(format!("{x} has no rational value")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceWitness {
    pub x: f64,
    pub nmax: usize,
    pub partial_norms: Vec<f64>,
    /// `Σ_{j=1}^{⌊n/2⌋+1} 1/j`: the harmonic series laid against the even
    /// terms, so that entry `n` pairs with `partial_norms[n]`.
    pub harmonic_comparison: Vec<f64>,
    /// Slope of `log c_n²` against `log n` over the tail.
    pub tail_exponent: f64,
    /// `(first, last)` index of the fitted tail.
    pub tail_range: (usize, usize),
    /// `tail_exponent > −1`: the terms decay slower than `1/n`.
    pub diverges: bool,
}

const TAIL_WINDOWS: usize = 16;

/// Fits the tail of `c_n²` (with `c_0 = 1`) to a power law.
///
/// The tail `n ∈ [nmax/4, nmax]` is split into equal windows and the fit is
/// made to the window means, which smooths out the zeros at odd `n` for
/// `x = 0` and the slow oscillation for `x ≠ 0`. This is a finite-`n`
/// certificate: an exponent above `−1` means the series of squared
/// coefficients behaves like a divergent `p`-series.
pub fn divergence_witness(x: f64, nmax: usize) -> Result<DivergenceWitness> {
    if nmax < 50 {
        return Err(Error::Precondition(format!("nmax must be at least 50, got {nmax}")));
    }
    let exp = expand_position_state(x, 1.0, nmax)?;
    let start = nmax / 4;
    let len = (nmax - start + 1) / TAIL_WINDOWS;
    let points: Vec<(f64, f64)> = (0..TAIL_WINDOWS)
        .filter_map(|w| {
            let lo = start + w * len;
            let window = &exp.coeffs[lo..lo + len];
            let mean = window.iter().map(|c| c * c).sum::<f64>() / len as f64;
            let centre = lo as f64 + (len as f64 - 1.0) / 2.0;
            (mean > 0.0).then(|| (centre.ln(), mean.ln()))
        })
        .collect();
    let tail_exponent = least_squares_slope(&points);

    let mut harmonic = Vec::with_capacity(nmax + 1);
    let mut h = 0.0;
    let mut upto = 0;
    for n in 0..=nmax {
        while upto < n / 2 + 1 {
            upto += 1;
            h += 1.0 / upto as f64;
        }
        harmonic.push(h);
    }
    Ok(DivergenceWitness {
        x,
        nmax,
        partial_norms: exp.partial_norms,
        harmonic_comparison: harmonic,
        tail_exponent,
        tail_range: (start, start + TAIL_WINDOWS * len - 1),
        diverges: tail_exponent > -1.0,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Truncation of `a + a†` to the lowest `dim` Fock states.
pub fn position_truncation(dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for n in 1..dim {
        let s = (n as f64).sqrt();
        m[(n - 1, n)] = s.into();
        m[(n, n - 1)] = s.into();
    }
    m
}

/// `diag(n + 1/2)` on the lowest `dim` Fock states.
pub fn oscillator_truncation(dim: usize) -> ComplexMatrix {
    let levels: Vec<f64> = (0..dim).map(|n| n as f64 + 0.5).collect();
    ComplexMatrix::from_real_diag(&levels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionTruncation {
    pub dim: usize,
    /// Eigenvalue of the truncated `a + a†` closest to zero.
    pub eigenvalue: f64,
    /// Squared norm of that eigenvector once scaled to `c_0 = 1`.
    pub norm_with_unit_c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorContrast {
    pub energies: Vec<f64>,
    /// `max |‖ψ_n‖ − 1|` over the oscillator eigenstates.
    pub max_norm_error: f64,
    pub position: Vec<PositionTruncation>,
    /// Oscillator states normalized, every truncated position state finite,
    /// and the `c_0 = 1` norm growing with the truncation.
    pub passed: bool,
}

/// Truncation sizes for the position-operator side of the contrast.
const POSITION_DIMS: [usize; 6] = [3, 5, 11, 21, 41, 81];

/// The oscillator Hamiltonian has unit-normalizable eigenstates at every
/// truncation; so do the truncated position operators, but their `c_0 = 1`
/// eigenvector norms keep growing with the truncation size.
pub fn oscillator_contrast(nmax: usize) -> Result<OscillatorContrast> {
    if nmax == 0 {
        return Err(Error::Precondition("nmax must be positive".into()));
    }
    let es = eigendecompose(&oscillator_truncation(nmax), DEFAULT_TOL)?.unit_normalized();
    let mut energies: Vec<f64> = es.values.iter().map(|e| e.re).collect();
    energies.sort_by(f64::total_cmp);
    let max_norm_error = (0..nmax)
        .map(|k| (vec_norm(&es.right_vector(k)) - 1.0).abs())
        .fold(0.0, f64::max);

    let mut position = Vec::new();
    for dim in POSITION_DIMS {
        let xs = eigendecompose(&position_truncation(dim), DEFAULT_TOL)?;
        let k = (0..dim)
            .min_by(|&a, &b| xs.values[a].norm().total_cmp(&xs.values[b].norm()))
            .expect("dim > 0");
        let v = xs.right_vector(k);
        let scaled: Vec<_> = v.iter().map(|c| c / v[0]).collect();
        position.push(PositionTruncation {
            dim,
            eigenvalue: xs.values[k].re,
            norm_with_unit_c0: vec_norm(&scaled).powi(2),
        });
    }
    let growing = position
        .windows(2)
        .all(|w| w[1].norm_with_unit_c0 > w[0].norm_with_unit_c0);
    let finite = position.iter().all(|p| p.norm_with_unit_c0.is_finite());
    Ok(OscillatorContrast {
        energies,
        passed: max_norm_error <= 1e-12 && growing && finite,
        max_norm_error,
        position,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn first_coefficients() {
        let x = 1.3;
        let e = expand_position_state(x, 2.0, 4).unwrap();
        assert!((e.coeffs[1] - 2.0 * x).abs() < 1e-15);
        assert!((e.coeffs[2] - 2.0 * (x * x - 1.0) / 2f64.sqrt()).abs() < 1e-14);
        assert!((e.coeffs[3] - 2.0 * (x.powi(3) - 3.0 * x) / 6f64.sqrt()).abs() < 1e-14);
        assert!(e.recurrence_residual() < 1e-15);
    }

    #[test]
    fn odd_terms_vanish_at_origin() {
        let e = expand_position_state(0.0, 1.0, 101).unwrap();
        assert!(e.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0));
        assert!(e.partial_norms.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn exact_squared_terms_at_origin() {
        let sq = squared_coefficients_exact(&BigRational::zero(), 8);
        let even: Vec<_> = sq.iter().step_by(2).cloned().collect();
        assert_eq!(even, vec![q(1, 1), q(1, 2), q(3, 8), q(5, 16), q(35, 128)]);
    }

    #[test]
    fn preconditions() {
        assert!(expand_position_state(0.0, 1.0, 1).is_err());
        assert!(divergence_witness(0.0, 49).is_err());
        assert!(matches!(
            expand_position_state(1e300, 1.0, 5),
            Err(Error::Overflow { n: 1 })
        ));
    }

    #[test]
    fn divergence_at_origin() {
        let w = divergence_witness(0.0, 2000).unwrap();
        assert!(w.diverges);
        assert!((w.tail_exponent + 0.5).abs() < 0.05, "{}", w.tail_exponent);
        for n in 0..=2000 {
            assert!(w.partial_norms[n] >= w.harmonic_comparison[n], "n = {n}");
            // strict from the first term where 3/8 > 1/3 onward
            if n >= 4 {
                assert!(w.partial_norms[n] > w.harmonic_comparison[n], "n = {n}");
            }
        }
    }

    #[test]
    fn small_truncations() {
        assert_eq!(
            position_truncation(2),
            ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
        );
        let c = oscillator_contrast(10).unwrap();
        assert!(c.passed, "{c:?}");
        let expected: Vec<f64> = (0..10).map(|n| n as f64 + 0.5).collect();
        assert_eq!(c.energies, expected);
    }

    #[test]
    fn truncated_position_eigenvector_is_the_truncated_expansion() {
        // with an odd truncation, 0 is an exact eigenvalue and the recurrence
        // holds on every row, so the c_0 = 1 norm is a partial sum at x = 0
        let c = oscillator_contrast(4).unwrap();
        let e = expand_position_state(0.0, 1.0, 80).unwrap();
        for p in &c.position {
            assert!(p.eigenvalue.abs() < 1e-12);
            let expected = e.partial_norms[p.dim - 1];
            assert!((p.norm_with_unit_c0 - expected).abs() < 1e-9 * expected, "{p:?}");
        }
    }
}
