//! Spectral analysis of matrix polynomials `P(z) = A_0 + A_1 z + ... + A_m z^m`
//! with nonsingular leading coefficient.
//!
//! The crate computes eigenvalues through the block companion linearization,
//! eigenvalue condition numbers by four independent routes, weighted
//! pseudospectra with level-set extraction, the distance from a simple
//! eigenvalue to multiplicity (with an explicit perturbation attaining the
//! bound's construction), and Elsner- and Bauer-Fike-type bounds for
//! perturbed spectra.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod condition;
pub mod error;
pub mod fixtures;
pub mod linearization;
pub mod perturb;
pub mod poly;
pub mod pseudospectra;
pub mod spectra;

pub use nalgebra::Complex;
pub type Complex64 = Complex<f64>;

pub use error::{PolyError, Result};
pub use poly::{CMatrix, CVector, MatrixPolynomial, WeightSet};
