//! Dense complex matrices and the general eigensolver everything else uses.

mod eigen;
mod io;
mod matrix;
mod svd;

pub use eigen::{
    canonical_order, eigendecompose, eigendecompose_unchecked, fix_phase, hessenberg, schur, triangular_eigenvectors,
    EigenSystem, RawEigen, Schur, DEFAULT_TOL,
};
pub use io::{format_complex, parse_complex};
pub use matrix::{c64, inner, pauli, sandwich, vec_norm, ComplexMatrix, C64};
pub use svd::singular_values;

/// Free-function form of [`ComplexMatrix::adjoint`].
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Free-function form of [`ComplexMatrix::inverse`].
pub fn inverse(a: &ComplexMatrix, tol: f64) -> crate::Result<ComplexMatrix> {
    a.inverse(tol)
}
