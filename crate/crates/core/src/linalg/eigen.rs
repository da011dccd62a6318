//! General complex eigendecomposition.
//!
//! Householder reduction to upper Hessenberg form, implicitly shifted
//! single-shift QR (Givens bulge chasing) to a complex Schur form
//! `A = Z T Z†`, then eigenvectors of the triangular factor by back
//! substitution, mapped back through `Z`. Left eigenvectors are the rows of
//! the inverse of the right-eigenvector matrix.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::{inner, vec_norm, ComplexMatrix};

/// Default relative tolerance used throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Eigenvalues with biorthonormal right and left eigenvectors.
///
/// Columns of `right` are the kets `|R_n⟩`; rows of `left` are the bras
/// `⟨L_n|`, with `left · right = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub values: Vec<C64>,
    pub right: ComplexMatrix,
    pub left: ComplexMatrix,
    /// 2-norm condition number of `right`.
    pub condition: f64,
}

/// Complex Schur form `A = Z T Z†` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
}

/// Eigendecomposition with canonical ordering and phase convention.
///
/// Eigenvalues are sorted by real part (descending), ties within
/// `tol · spectral radius` broken by imaginary part (descending). Each right
/// eigenvector is scaled so that its largest-magnitude component equals `1`.
/// Fails with [`Error::NonDiagonalizable`] once the eigenvector matrix has a
/// condition number above `1 / tol`.
pub fn eigendecompose(h: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    let raw = eigendecompose_unchecked(h, tol)?;
    let threshold = 1.0 / tol;
    if raw.condition.is_nan() || raw.condition > threshold {
        return Err(Error::NonDiagonalizable {
            condition: raw.condition,
            threshold,
        });
    }
    let left = raw.right.inverse(tol)?;
    Ok(EigenSystem {
        values: raw.values,
        right: raw.right,
        left,
        condition: raw.condition,
    })
}

/// Eigenvalues and canonical right eigenvectors without the diagonalizability
/// gate; `left` is not formed.
#[derive(Debug, Clone)]
pub struct RawEigen {
    pub values: Vec<C64>,
    pub right: ComplexMatrix,
    pub condition: f64,
}

pub fn eigendecompose_unchecked(h: &ComplexMatrix, tol: f64) -> Result<RawEigen> {
    if !h.is_finite() {
        let k = h
            .as_slice()
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
            .unwrap_or(0);
        return Err(Error::NonFinite {
            row: k / h.dim(),
            col: k % h.dim(),
        });
    }
    let n = h.dim();
    let Schur { t, z } = schur(h)?;
    let vals: Vec<C64> = t.diagonal();
    let x = triangular_eigenvectors(&t);
    let vecs = &z * &x;

    let order = canonical_order(&vals, tol);
    let mut right = ComplexMatrix::zeros(n);
    let mut values = Vec::with_capacity(n);
    for (k, &idx) in order.iter().enumerate() {
        values.push(vals[idx]);
        right.set_column(k, &fix_phase(&vecs.column(idx)));
    }
    let condition = right.condition_number();
    Ok(RawEigen {
        values,
        right,
        condition,
    })
}

/// Sort key: real part descending, then imaginary part descending. Real parts
/// that agree within `tol · max|E|` are treated as equal.
pub fn canonical_order(vals: &[C64], tol: f64) -> Vec<usize> {
    let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| {
        vals[b]
            .re
            .total_cmp(&vals[a].re)
            .then(vals[b].im.total_cmp(&vals[a].im))
    });
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let anchor = vals[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && (anchor - vals[idx[end]].re).abs() <= tol * scale {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| vals[b].im.total_cmp(&vals[a].im));
        out.extend(group);
        start = end;
    }
    out
}

/// Scales `v` so that its largest-magnitude component is exactly `1`.
/// Near-ties (within 1e-9 relative) go to the lowest index.
pub fn fix_phase(v: &[C64]) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v.to_vec();
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap_or(0);
    let s = v[pivot].inv();
    let mut out: Vec<C64> = v.iter().map(|&z| z * s).collect();
    out[pivot] = C64::new(1.0, 0.0);
    out
}

/// Complex Schur decomposition.
pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    let n = a.dim();
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { t: h, z });
    }
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE / eps;
    let max_iter = 40 * n;

    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub <= small {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > max_iter {
            return Err(Error::ConvergenceFailure { iterations: total });
        }

        let shift = if iter.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        qr_sweep(&mut h, &mut z, lo, hi, shift);
    }

    // clear rounding residue below the diagonal
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, z })
}

/// Eigenvalue of the trailing 2×2 block closest to its bottom-right entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = d - b * c / (half + disc);
    let mu2 = d - b * c / (half - disc);
    let pick = |m: C64| {
        if m.re.is_finite() && m.im.is_finite() {
            Some(m)
        } else {
            None
        }
    };
    match (pick(mu1), pick(mu2)) {
        (Some(x), Some(y)) => {
            if (x - d).norm() <= (y - d).norm() {
                x
            } else {
                y
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => d,
    }
}

/// Complex Givens rotation `G = [[c, s], [−s̄, c]]` with `G·[a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Rows `i, i+1` ← G · rows, over columns `cols`.
fn rotate_rows(h: &mut ComplexMatrix, i: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let (x, y) = (h[(i, j)], h[(i + 1, j)]);
        h[(i, j)] = x * c + s * y;
        h[(i + 1, j)] = -s.conj() * x + y * c;
    }
}

/// Columns `i, i+1` ← columns · G†, over rows `rows`.
fn rotate_cols(h: &mut ComplexMatrix, i: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for k in rows {
        let (x, y) = (h[(k, i)], h[(k, i + 1)]);
        h[(k, i)] = x * c + s.conj() * y;
        h[(k, i + 1)] = -s * x + y * c;
    }
}

fn qr_sweep(h: &mut ComplexMatrix, z: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    let n = h.dim();
    let (c, s) = givens(h[(lo, lo)] - shift, h[(lo + 1, lo)]);
    rotate_rows(h, lo, c, s, lo..n);
    rotate_cols(h, lo, c, s, 0..(lo + 3).min(hi + 1));
    rotate_cols(z, lo, c, s, 0..n);
    for k in lo + 1..hi {
        let (c, s) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
        rotate_rows(h, k, c, s, k - 1..n);
        h[(k + 1, k - 1)] = ZERO;
        rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
        rotate_cols(z, k, c, s, 0..n);
    }
}

/// Householder reduction `A = Q H Q†`, returning `(H, Q)`.
pub fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = vec_norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H ← (I − 2vv†) H on rows k+1..n
        for j in 0..n {
            let col: Vec<C64> = (k + 1..n).map(|i| h[(i, j)]).collect();
            let d = inner(&v, &col) * 2.0;
            for (off, i) in (k + 1..n).enumerate() {
                h[(i, j)] -= v[off] * d;
            }
        }
        // H ← H (I − 2vv†) and Q ← Q (I − 2vv†) on columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let d: C64 = (k + 1..n).enumerate().map(|(off, j)| m[(i, j)] * v[off]).sum::<C64>() * 2.0;
                for (off, j) in (k + 1..n).enumerate() {
                    m[(i, j)] -= d * v[off].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Right eigenvectors of an upper-triangular matrix, one per diagonal entry.
/// Near-zero pivots are replaced by a small perturbation so defective blocks
/// produce (nearly) parallel vectors rather than NaNs.
pub fn triangular_eigenvectors(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.dim();
    let mut x = ComplexMatrix::zeros(n);
    let smin = (f64::EPSILON * t.max_abs()).max(f64::MIN_POSITIVE * 1e10);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut v = vec![ZERO; n];
        v[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * v[j]).sum();
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            v[i] = -s / d;
            let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                for z in v.iter_mut() {
                    *z /= big;
                }
            }
        }
        x.set_column(k, &v);
    }
    x
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `|R_n⟩`.
    pub fn right_vector(&self, n: usize) -> Vec<C64> {
        self.right.column(n)
    }

    /// Components of the bra `⟨L_n|` (row `n` of `left`).
    pub fn left_row(&self, n: usize) -> Vec<C64> {
        self.left.row(n)
    }

    /// `R · diag(E) · L`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.function(|e| e)
    }

    /// `R · diag(f(E)) · L`.
    pub fn function(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(&self.values.iter().map(|&e| f(e)).collect::<Vec<_>>());
        &(&self.right * &d) * &self.left
    }

    /// `exp(−iHt)` from the spectral decomposition.
    pub fn evolution(&self, t: f64) -> ComplexMatrix {
        self.function(|e| (C64::new(0.0, -t) * e).exp())
    }

    /// `‖L·R − I‖_F`.
    pub fn biorthogonality_residual(&self) -> f64 {
        (&self.left * &self.right).distance(&ComplexMatrix::identity(self.dim()))
    }

    /// `‖R diag(E) L − H‖_F / ‖H‖_F`.
    pub fn reconstruction_residual(&self, h: &ComplexMatrix) -> f64 {
        self.reconstruct().distance(h) / h.norm_fro().max(f64::MIN_POSITIVE)
    }

    /// Rescales `|R_n⟩ → d_n |R_n⟩` and `⟨L_n| → ⟨L_n| / d_n`.
    pub fn rescaled(&self, factors: &[C64]) -> Self {
        assert_eq!(factors.len(), self.dim(), "one factor per eigenvector");
        let n = self.dim();
        let mut right = self.right.clone();
        let mut left = self.left.clone();
        for (k, &d) in factors.iter().enumerate() {
            for i in 0..n {
                right[(i, k)] *= d;
                left[(k, i)] /= d;
            }
        }
        Self {
            values: self.values.clone(),
            condition: right.condition_number(),
            right,
            left,
        }
    }

    /// Unit Dirac norm for every right eigenvector, phases kept.
    pub fn unit_normalized(&self) -> Self {
        let f: Vec<C64> = (0..self.dim())
            .map(|k| C64::new(1.0 / vec_norm(&self.right_vector(k)), 0.0))
            .collect();
        self.rescaled(&f)
    }

    /// Replaces the right eigenvectors and recomputes `left = right⁻¹`.
    pub fn with_right(&self, right: ComplexMatrix, tol: f64) -> Result<Self> {
        let left = right.inverse(tol)?;
        Ok(Self {
            values: self.values.clone(),
            condition: right.condition_number(),
            right,
            left,
        })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
