//! Matrix polynomials `P(z) = A_0 + A_1 z + ... + A_m z^m`, their weights, and
//! the dense singular-value helpers used by every other module.

use nalgebra::{DMatrix, DVector};

use crate::error::{PolyError, Result};
use crate::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative threshold on `s_min(A_m) / s_max(A_m)` below which the leading
/// coefficient is treated as singular.
pub const LEADING_SINGULARITY_TOL: f64 = 1e-12;

/// An `n x n` matrix polynomial of degree `m` with nonsingular leading
/// coefficient. Coefficients are stored lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    n: usize,
    coeffs: Vec<CMatrix>,
}

impl MatrixPolynomial {
    /// Builds `P` from `A_0, ..., A_m`. The degree is `coeffs.len() - 1` and is
    /// never trimmed: a singular `A_m` is an error.
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(PolyError::InvalidInput(format!(
                "a matrix polynomial needs at least two coefficients, got {}",
                coeffs.len()
            )));
        }
        let n = coeffs[0].nrows();
        if n == 0 {
            return Err(PolyError::InvalidInput("coefficient dimension is zero".into()));
        }
        for (j, a) in coeffs.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(PolyError::DimensionMismatch(format!(
                    "A_{j} is {}x{}, expected {n}x{n}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            check_finite(a, &format!("A_{j}"))?;
        }
        let sv = singular_values(coeffs.last().unwrap());
        let (s_max, s_min) = (sv[0], sv[n - 1]);
        if !(s_min > LEADING_SINGULARITY_TOL * s_max) {
            return Err(PolyError::SingularLeading { s_min, s_max });
        }
        Ok(Self { n, coeffs })
    }

    /// Convenience constructor from real coefficient matrices given row-major.
    pub fn from_real(n: usize, coeffs: &[&[f64]]) -> Result<Self> {
        let mats = coeffs
            .iter()
            .map(|c| {
                if c.len() != n * n {
                    return Err(PolyError::DimensionMismatch(format!(
                        "expected {} entries, got {}",
                        n * n,
                        c.len()
                    )));
                }
                Ok(CMatrix::from_row_iterator(
                    n,
                    n,
                    c.iter().map(|&v| Complex64::new(v, 0.0)),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `n * m`, the number of eigenvalues counted with multiplicity.
    pub fn nm(&self) -> usize {
        self.n * self.degree()
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &CMatrix {
        &self.coeffs[j]
    }

    pub fn leading(&self) -> &CMatrix {
        &self.coeffs[self.degree()]
    }

    /// `P(z)` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> CMatrix {
        let m = self.degree();
        let mut acc = self.coeffs[m].clone();
        for j in (0..m).rev() {
            acc *= z;
            acc += &self.coeffs[j];
        }
        acc
    }

    /// `P^(order)(z)`. Orders above the degree give the zero matrix.
    pub fn eval_derivative(&self, z: Complex64, order: usize) -> CMatrix {
        let m = self.degree();
        if order == 0 {
            return self.eval(z);
        }
        if order > m {
            return CMatrix::zeros(self.n, self.n);
        }
        // Horner over j = order..=m with falling-factorial weights j!/(j-order)!.
        let mut acc = &self.coeffs[m] * Complex64::from(falling_factorial(m, order));
        for j in (order..m).rev() {
            acc *= z;
            acc += &self.coeffs[j] * Complex64::from(falling_factorial(j, order));
        }
        acc
    }

    /// `max_j ||A_j||` in the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn det_leading(&self) -> Complex64 {
        self.leading().clone().lu().determinant()
    }

    /// Applies `A_j -> L A_j R` to every coefficient.
    pub fn transform(&self, left: &CMatrix, right: &CMatrix) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|a| left * a * right).collect())
    }
}

fn falling_factorial(j: usize, k: usize) -> f64 {
    ((j - k + 1)..=j).map(|v| v as f64).product()
}

/// Nonnegative perturbation weights `w_0, ..., w_m` with `w_0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    weights: Vec<f64>,
}

impl WeightSet {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(PolyError::InvalidInput("weight set is empty".into()));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(PolyError::InvalidInput(format!(
                "weight w_{j} = {w} must be finite and nonnegative"
            )));
        }
        if !(weights[0] > 0.0) {
            return Err(PolyError::InvalidInput("weight w_0 must be positive".into()));
        }
        Ok(Self { weights })
    }

    /// All-ones weights for a degree-`m` polynomial.
    pub fn ones(m: usize) -> Self {
        Self {
            weights: vec![1.0; m + 1],
        }
    }

    /// `w_j = ||A_j||`. When `A_0 = 0` the weight `w_0` is floored to the
    /// smallest positive double and the returned flag is set.
    pub fn from_norms(p: &MatrixPolynomial) -> (Self, bool) {
        let mut weights: Vec<f64> = p.coeffs().iter().map(spectral_norm).collect();
        let floored = !(weights[0] > 0.0);
        if floored {
            weights[0] = f64::MIN_POSITIVE;
        }
        (Self { weights }, floored)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn degree(&self) -> usize {
        self.weights.len() - 1
    }

    /// `w(r)` for `order == 0`, `w'(r)` for `order == 1`, and so on.
    pub fn eval(&self, r: f64, order: usize) -> f64 {
        let m = self.degree();
        if order > m {
            return 0.0;
        }
        let mut acc = self.weights[m] * falling_factorial(m, order);
        for j in (order..m).rev() {
            acc = acc * r + self.weights[j] * falling_factorial(j, order);
        }
        acc
    }

    /// Fails unless the weight count matches the degree of `p`.
    pub fn check_matches(&self, p: &MatrixPolynomial) -> Result<()> {
        if self.degree() != p.degree() {
            return Err(PolyError::DimensionMismatch(format!(
                "{} weights for a degree-{} polynomial",
                self.weights.len(),
                p.degree()
            )));
        }
        Ok(())
    }
}

fn to_faer(m: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m)
        .singular_values()
        .expect("SVD of a finite matrix converges")
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn s_min(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Full SVD `M = U diag(s) V*` with singular values descending; returns
/// `(U, s, V)` with `V` (not `V*`).
pub fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let dec = to_faer(m).svd().expect("SVD of a finite matrix converges");
    let s = dec.S().column_vector().iter().map(|c| c.re).collect();
    (from_faer(dec.U()), s, from_faer(dec.V()))
}

/// Eigenvalues of a square matrix, unordered.
pub(crate) fn dense_eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    to_faer(m).eigenvalues().ok()
}

/// `||A|| ||A^{-1}||` as the ratio of extreme singular values.
pub fn matrix_condition(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    sv[0] / sv[sv.len() - 1]
}

pub fn check_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(PolyError::NonFinite(what.to_string()))
    }
}
