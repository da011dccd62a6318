//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! Only the values are needed here: they drive condition numbers and the
//! singularity test in [`ComplexMatrix::inverse`](super::ComplexMatrix::inverse).

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 60;

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    if n == 0 {
        return Vec::new();
    }
    // column-major working copy
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rephase column q so the overlap is real and positive
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = cols.split_at_mut(q);
                for (xp, xq) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*xp, *xq * phase);
                    *xp = x * c - y * s;
                    *xq = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::c64;

    #[test]
    fn diagonal_singular_values() {
        let m = ComplexMatrix::from_diag(&[c64(0.0, -3.0), c64(1.0, 0.0), c64(0.0, 0.5)]);
        let sv = singular_values(&m);
        assert!((sv[0] - 3.0).abs() < 1e-15);
        assert!((sv[1] - 1.0).abs() < 1e-15);
        assert!((sv[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rank_one_has_zero_singular_value() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c64(1.0, 1.0), c64(2.0, 2.0)],
            vec![c64(0.5, 0.0), c64(1.0, 0.0)],
        ])
        .unwrap();
        let sv = singular_values(&m);
        assert!(sv[1] < 1e-15 * sv[0]);
        // Frobenius norm is preserved
        let fro = (sv[0] * sv[0] + sv[1] * sv[1]).sqrt();
        assert!((fro - m.norm_fro()).abs() < 1e-14);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let h = 0.5f64.sqrt();
        let m = ComplexMatrix::from_rows(vec![vec![c64(h, 0.0), c64(0.0, h)], vec![c64(0.0, h), c64(h, 0.0)]]).unwrap();
        for s in singular_values(&m) {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
