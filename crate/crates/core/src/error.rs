use thiserror::Error;

use crate::Complex64;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("leading coefficient is numerically singular (s_min = {s_min:e}, s_max = {s_max:e})")]
    SingularLeading { s_min: f64, s_max: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("eigensolver failed to converge on a {0}x{0} companion matrix")]
    EigenSolver(usize),

    #[error("{z} is not an eigenvalue (s_min(P(z)) = {s_min:e}, tolerance {tol:e})")]
    NotAnEigenvalue { z: Complex64, s_min: f64, tol: f64 },

    #[error("eigenvalue {0} is not simple: {1}")]
    NotSimple(Complex64, String),

    #[error("eigenvalue {z} is numerically defective: |y* P'(z) x| = {value:e} below {threshold:e}")]
    Defective { z: Complex64, value: f64, threshold: f64 },

    #[error("P'({0}) is numerically singular")]
    SingularDerivative(Complex64),

    #[error("[P'(z)]* y is parallel to x at z = {z}: ||y* P'||^2 - |y* P' x|^2 = {gap:e}")]
    ParallelVectors { z: Complex64, gap: f64 },

    #[error("adjugate singular-value gap violated: s_(n-1) = {s_penultimate:e}, s_n = {s_last:e}, required ratio {gap:e}")]
    AdjugateGap { s_penultimate: f64, s_last: f64, gap: f64 },

    #[error("invalid Jordan triple: {0}")]
    InvalidTriple(String),

    #[error("degenerate exponent: {0}")]
    DegenerateExponent(String),

    #[error("{0}")]
    NoComponent(String),

    #[error("perturbation failed: {0}")]
    Perturbation(String),
}

pub type Result<T> = std::result::Result<T, PolyError>;
