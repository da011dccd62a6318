//! Inner products for finite-dimensional non-Hermitian Hamiltonians with an
//! antilinear (PT-type) symmetry.
//!
//! The crate builds the metric `V` with `V H V⁻¹ = H†`, the PT-conjugate
//! inner product with intrinsic PT phases, and the `PV` / `C` operators, and
//! checks when each exists, when they coincide and when they fail. The
//! closed-form two-level model in [`twolevel`] and the truncated Fock-space
//! construction in [`fockdemo`] serve as analytic references.

pub mod antilinear;
pub mod cpt;
mod error;
pub mod fockdemo;
pub mod intertwiner;
pub mod linalg;
pub mod spectra;
pub mod twolevel;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix, EigenSystem, C64, DEFAULT_TOL};
