#![allow(dead_code)]

use pthamil_core::{c64, ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_real(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| c64(rng.sample(StandardNormal), 0.0)).collect();
    ComplexMatrix::from_vec(n, data).unwrap()
}

pub fn random_complex(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexMatrix::from_vec(n, data).unwrap()
}

/// Real matrix with the prescribed real spectrum, `B diag(E) B⁻¹` for a
/// random well-conditioned `B`.
pub fn planted_real_spectrum(rng: &mut impl Rng, energies: &[f64]) -> ComplexMatrix {
    let n = energies.len();
    loop {
        let b = random_real(rng, n);
        if b.condition_number() < 50.0 {
            let d = ComplexMatrix::from_real_diag(energies);
            return &(&b * &d) * &b.inverse(1e-12).unwrap();
        }
    }
}

pub fn max_entry_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn to_nalgebra(m: &ComplexMatrix) -> nalgebra::DMatrix<C64> {
    let n = m.dim();
    nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

/// Greedy matching distance between two multisets of eigenvalues.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
