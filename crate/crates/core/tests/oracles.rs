//! Independent oracles: a third-party eigensolver, the two-level closed forms
//! and exact rational arithmetic for the Fock recurrence.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use pthamil_core::fockdemo::{
    divergence_witness, expand_position_state, scaled_coefficients_exact, squared_coefficients_exact,
};
use pthamil_core::linalg::eigendecompose;
use pthamil_core::spectra::eigenvector_condition;
use pthamil_core::twolevel::{closed_forms, compare_with_pipeline, TwoLevelModel};
use pthamil_core::DEFAULT_TOL;
use rand::Rng;

use common::*;

#[test]
fn eigenvalues_agree_with_nalgebra_on_complex_matrices() {
    let mut rng = rng(11);
    for trial in 0..200 {
        let n = 2 + trial % 7;
        let h = random_complex(&mut rng, n);
        let ours = eigendecompose(&h, DEFAULT_TOL).unwrap();
        let (_, t) = to_nalgebra(&h).schur().unpack();
        let theirs: Vec<_> = t.diagonal().iter().copied().collect();
        let scale = ours.spectral_radius().max(1.0);
        assert!(
            spectrum_distance(&ours.values, &theirs) < 1e-10 * scale,
            "trial {trial}"
        );
    }
}

#[test]
fn eigenvalues_agree_with_nalgebra_on_real_matrices() {
    let mut rng = rng(12);
    for trial in 0..200 {
        let n = 2 + trial % 7;
        let h = random_real(&mut rng, n);
        let ours = eigendecompose(&h, DEFAULT_TOL).unwrap();
        let real = nalgebra::DMatrix::from_fn(n, n, |i, j| h[(i, j)].re);
        let theirs: Vec<_> = real.complex_eigenvalues().iter().copied().collect();
        let scale = ours.spectral_radius().max(1.0);
        assert!(
            spectrum_distance(&ours.values, &theirs) < 1e-10 * scale,
            "trial {trial}"
        );
        // real input: eigenvalues are closed under conjugation
        let conj: Vec<_> = ours.values.iter().map(|e| e.conj()).collect();
        assert!(spectrum_distance(&ours.values, &conj) < 1e-10 * scale);
    }
}

#[test]
fn two_level_pipeline_matches_closed_forms() {
    let mut rng = rng(13);
    for _ in 0..1000 {
        let alpha: f64 = rng.gen_range(0.1..10.0);
        let beta: f64 = alpha * rng.gen_range(0.0..0.95);
        let m = TwoLevelModel::new(alpha, beta).unwrap();
        let cmp = compare_with_pipeline(&m, DEFAULT_TOL).unwrap();
        assert!(cmp.max_error <= 1e-9, "({alpha}, {beta}): {cmp:?}");
        assert!(cmp.dirac_overlap <= 1e-10, "({alpha}, {beta}): {cmp:?}");
    }
}

#[test]
fn closed_forms_satisfy_their_defining_relations() {
    // checked with plain 2×2 arithmetic, independent of the closed-form code
    for (a, b) in [(5.0f64, 3.0f64), (2.0, 1.0), (7.5, 0.2)] {
        let cf = closed_forms(&TwoLevelModel::new(a, b).unwrap()).unwrap();
        let e = (a * a - b * b).sqrt();
        let (x, y) = (cf.u_plus[0], cf.u_plus[1]);
        // H u₊ = E u₊ with H = [[0, a+b], [a−b, 0]]
        assert!(((a + b) * y - e * x).abs() < 1e-12);
        assert!(((a - b) * x - e * y).abs() < 1e-12);
        let (ch, sh) = (cf.cosh_2theta, cf.sinh_2theta);
        assert!((ch * ch - sh * sh - 1.0).abs() < 1e-12);
        assert!((a * sh - b * ch).abs() < 1e-12);
        // u₊† V u₊ = 1 with V = diag(ch − sh, ch + sh)
        assert!(((ch - sh) * x * x + (ch + sh) * y * y - 1.0).abs() < 1e-12);
        let dirac = cf.u_minus[0] * x + cf.u_minus[1] * y;
        assert!((dirac - b / e).abs() < 1e-12);
    }
}

#[test]
fn eigenvector_condition_diverges_towards_the_exceptional_point() {
    let betas = [0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999];
    let conds: Vec<f64> = betas
        .iter()
        .map(|&b| eigenvector_condition(&TwoLevelModel::new(1.0, b).unwrap().hamiltonian(), DEFAULT_TOL).unwrap())
        .collect();
    assert!(conds.windows(2).all(|w| w[1] > w[0]), "{conds:?}");
    assert!(conds.last().unwrap() > &100.0);
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The printed polynomials `c_n √(n!) / c_0` for `n ≤ 6`.
fn printed_polynomial(n: usize, x: &BigRational) -> BigRational {
    let p = |k: i32| -> BigRational { num_traits::pow(x.clone(), k as usize) };
    let k = |c: i64| BigRational::from_integer(BigInt::from(c));
    match n {
        0 => k(1),
        1 => x.clone(),
        2 => p(2) - k(1),
        3 => p(3) - k(3) * x,
        4 => p(4) - k(6) * p(2) + k(3),
        5 => p(5) - k(10) * p(3) + k(15) * x,
        6 => p(6) - k(15) * p(4) + k(45) * p(2) - k(15),
        _ => unreachable!(),
    }
}

#[test]
fn fock_coefficients_match_printed_polynomials_exactly() {
    for x in [q(-2, 1), q(0, 1), q(1, 2), q(3, 1)] {
        let d = scaled_coefficients_exact(&x, 6);
        for (n, dn) in d.iter().enumerate() {
            assert_eq!(dn, &printed_polynomial(n, &x), "x = {x}, n = {n}");
        }
    }
}

#[test]
fn fock_float_recurrence_tracks_exact_values() {
    for x in [-2.0, 0.0, 0.5, 3.0] {
        let exact = squared_coefficients_exact(&BigRational::from_float(x).unwrap(), 30);
        let e = expand_position_state(x, 1.0, 30).unwrap();
        for (n, c) in e.coeffs.iter().enumerate() {
            let want: f64 = num_traits::ToPrimitive::to_f64(&exact[n]).unwrap();
            assert!((c * c - want).abs() <= 1e-12 * want.max(1.0), "x = {x}, n = {n}");
        }
    }
}

#[test]
fn fock_origin_ratio_recursion_in_rationals() {
    let sq = squared_coefficients_exact(&BigRational::zero(), 40);
    for n in 2..=40usize {
        if n % 2 == 0 {
            assert_eq!(&sq[n] / &sq[n - 2], q(n as i64 - 1, n as i64), "n = {n}");
        } else {
            assert!(sq[n].is_zero());
        }
    }
    // the sign alternates: c_n = −c_{n−2} √((n−1)/n)
    let d = scaled_coefficients_exact(&BigRational::zero(), 40);
    for n in (2..=40).step_by(2) {
        assert!((&d[n] * &d[n - 2]).is_negative());
    }
}

#[test]
fn larger_x_diverges_faster() {
    let origin = divergence_witness(0.0, 2000).unwrap();
    let far = divergence_witness(3.0, 2000).unwrap();
    assert!(far.diverges, "{}", far.tail_exponent);
    for n in [100, 500, 1000, 2000] {
        assert!(far.partial_norms[n] > origin.partial_norms[n]);
    }
    // partial sums keep growing like a divergent p-series
    assert!(origin.partial_norms[2000] > 1.5 * origin.partial_norms[500]);
}
