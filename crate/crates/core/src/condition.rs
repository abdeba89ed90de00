//! Eigenvalue condition numbers
//! `k(P, l) = limsup_{eps -> 0} sup { |dl| / eps : Q in B(P, eps, w) }`
//! by four routes: eigenvectors of `P`, eigenvectors of the companion matrix,
//! the multiple-eigenvalue analogue `k_hat`, and an eigenvector-free formula
//! through the adjugate of `P(l)`.

use crate::error::{PolyError, Result};
use crate::perturb::{random_perturbation_at, MAX_RETRIES};
use crate::poly::{singular_values, spectral_norm, CMatrix, CVector, MatrixPolynomial, WeightSet};
use crate::spectra::{companion_vectors, eigenvalues, CompanionEigenPair, Spectrum};
use crate::Complex64;

/// `|y* P'(l) x|` at or below `DEFECT_TOL * ||P'(l)|| ||x|| ||y||` is treated as zero.
pub const DEFECT_TOL: f64 = 1e-14;

/// Default required ratio `s_{n-1} / s_n` in [`adjugate_norm`].
pub const ADJUGATE_GAP: f64 = 1e6;

/// `w(|l|) ||x|| ||y|| / |y* P'(l) x|`.
pub fn cond_simple(p: &MatrixPolynomial, w: &WeightSet, lambda0: Complex64, x: &CVector, y: &CVector) -> Result<f64> {
    w.check_matches(p)?;
    check_vector(p, x, "x")?;
    check_vector(p, y, "y")?;
    let dp = p.eval_derivative(lambda0, 1);
    let value = y.dotc(&(&dp * x)).norm();
    let threshold = DEFECT_TOL * spectral_norm(&dp) * x.norm() * y.norm();
    if value <= threshold {
        return Err(PolyError::Defective {
            z: lambda0,
            value,
            threshold,
        });
    }
    Ok(w.eval(lambda0.norm(), 0) * x.norm() * y.norm() / value)
}

fn check_vector(p: &MatrixPolynomial, v: &CVector, name: &str) -> Result<()> {
    if v.len() != p.n() {
        return Err(PolyError::DimensionMismatch(format!(
            "{name} has length {}, expected {}",
            v.len(),
            p.n()
        )));
    }
    if !(v.norm() > 0.0) {
        return Err(PolyError::InvalidInput(format!("{name} must be nonzero")));
    }
    Ok(())
}

/// Condition number of the eigenvalue of `C_P` with right eigenvector `chi`
/// and left eigenvector `psi`: `||chi|| ||psi|| / |psi* chi|`.
pub fn cond_companion(pair: &CompanionEigenPair) -> Result<f64> {
    let nc = pair.chi.norm();
    let np = pair.psi.norm();
    let inner = pair.psi.dotc(&pair.chi).norm();
    if inner <= DEFECT_TOL * nc * np {
        return Err(PolyError::InvalidInput(format!(
            "psi* chi = {inner:e} vanishes relative to ||chi|| ||psi|| = {:e}",
            nc * np
        )));
    }
    Ok(nc * np / inner)
}

/// `k(P, l) = w(|l|) / (||chi|| ||psi||) * k(C_P, l)`, with the companion
/// eigenvectors built from `x` and `y`.
pub fn cond_via_companion(
    p: &MatrixPolynomial,
    w: &WeightSet,
    lambda0: Complex64,
    x: &CVector,
    y: &CVector,
) -> Result<f64> {
    w.check_matches(p)?;
    check_vector(p, x, "x")?;
    check_vector(p, y, "y")?;
    let pair = companion_vectors(p, lambda0, &x.normalize(), &y.normalize());
    let kc = cond_companion(&pair)?;
    Ok(w.eval(lambda0.norm(), 0) / (pair.chi.norm() * pair.psi.norm()) * kc)
}

/// `k_hat(P, l) = w(|l|) ||X_hat Y_hat||` for `X_hat` (`n x kappa`) and
/// `Y_hat` (`kappa x n`) of full rank `kappa`.
pub fn cond_multiple(
    p: &MatrixPolynomial,
    w: &WeightSet,
    lambda0: Complex64,
    xhat: &CMatrix,
    yhat: &CMatrix,
) -> Result<f64> {
    w.check_matches(p)?;
    let n = p.n();
    let kappa = xhat.ncols();
    if kappa == 0 || kappa > n || xhat.nrows() != n || yhat.shape() != (kappa, n) {
        return Err(PolyError::DimensionMismatch(format!(
            "X_hat is {}x{}, Y_hat is {}x{}; expected {n}xk and kx{n} with 1 <= k <= {n}",
            xhat.nrows(),
            xhat.ncols(),
            yhat.nrows(),
            yhat.ncols()
        )));
    }
    for (name, m) in [("X_hat", xhat), ("Y_hat", yhat)] {
        let s = singular_values(m);
        if !(s[kappa - 1] > 1e-12 * s[0]) {
            return Err(PolyError::InvalidInput(format!("{name} is rank deficient")));
        }
    }
    Ok(w.eval(lambda0.norm(), 0) * spectral_norm(&(xhat * yhat)))
}

/// `||adj(M)||` as the product of the `n - 1` largest singular values,
/// valid when the smallest one is a simple zero (`s_{n-1} > 1e6 s_n`).
pub fn adjugate_norm(m: &CMatrix) -> Result<f64> {
    adjugate_norm_with_gap(m, ADJUGATE_GAP)
}

pub fn adjugate_norm_with_gap(m: &CMatrix, gap: f64) -> Result<f64> {
    if !m.is_square() || m.is_empty() {
        return Err(PolyError::DimensionMismatch(format!(
            "adjugate of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 1 {
        return Ok(1.0);
    }
    let s = singular_values(m);
    if !(s[n - 2] > gap * s[n - 1]) {
        return Err(PolyError::AdjugateGap {
            s_penultimate: s[n - 2],
            s_last: s[n - 1],
            gap,
        });
    }
    Ok(s[..n - 1].iter().product())
}

/// The pieces of the eigenvector-free condition number of eigenvalue `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjugateQuotient {
    pub eigenvalue: Complex64,
    pub weight: f64,
    pub adj_norm: f64,
    pub det_leading: f64,
    /// `sum_{j != i} ln |l_j - l_i|`.
    pub log_gap_product: f64,
}

impl AdjugateQuotient {
    /// `w(|l_i|) ||adj P(l_i)|| / |det A_m|`.
    pub fn numerator(&self) -> f64 {
        self.weight * self.adj_norm / self.det_leading
    }

    /// `prod_{j != i} |l_j - l_i|`.
    pub fn gap_product(&self) -> f64 {
        self.log_gap_product.exp()
    }

    pub fn cond(&self) -> f64 {
        (self.weight.ln() + self.adj_norm.ln() - self.det_leading.ln() - self.log_gap_product).exp()
    }
}

pub fn adjugate_quotient(p: &MatrixPolynomial, w: &WeightSet, i: usize, spec: &Spectrum) -> Result<AdjugateQuotient> {
    w.check_matches(p)?;
    if spec.len() != p.nm() {
        return Err(PolyError::DimensionMismatch(format!(
            "spectrum has {} values, polynomial has {}",
            spec.len(),
            p.nm()
        )));
    }
    spec.require_simple(i)?;
    let li = spec.eigenvalues()[i];
    let mut log_gap_product = 0.0;
    for (j, lj) in spec.eigenvalues().iter().enumerate() {
        if j == i {
            continue;
        }
        let d = (lj - li).norm();
        if d == 0.0 {
            return Err(PolyError::NotSimple(li, format!("coincides with eigenvalue {j}")));
        }
        log_gap_product += d.ln();
    }
    Ok(AdjugateQuotient {
        eigenvalue: li,
        weight: w.eval(li.norm(), 0),
        adj_norm: adjugate_norm(&p.eval(li))?,
        det_leading: p.det_leading().norm(),
        log_gap_product,
    })
}

/// `w(|l_i|) ||adj P(l_i)|| / (|det A_m| prod_{j != i} |l_j - l_i|)`.
pub fn cond_eigvector_free(p: &MatrixPolynomial, w: &WeightSet, i: usize, spec: &Spectrum) -> Result<f64> {
    adjugate_quotient(p, w, i, spec).map(|q| q.cond())
}

/// Upper bound `(w(|l_i|) ||adj P(l_i)|| / (k(P, l_i) |det A_m|))^{1/(nm-1)}`
/// on the distance from `l_i` to the rest of the spectrum, with `k` from
/// the eigenvectors stored in `spec`.
pub fn min_gap_bound(p: &MatrixPolynomial, w: &WeightSet, i: usize, spec: &Spectrum) -> Result<f64> {
    let nm = p.nm();
    if nm == 1 {
        return Err(PolyError::DegenerateExponent(
            "nm = 1: there is no other eigenvalue".into(),
        ));
    }
    let q = adjugate_quotient(p, w, i, spec)?;
    let v = spec.vectors(i).ok_or_else(|| {
        PolyError::InvalidInput(format!("no eigenvectors stored for eigenvalue {i}"))
    })?;
    let k = cond_simple(p, w, q.eigenvalue, &v.x, &v.y)?;
    Ok(((q.weight.ln() + q.adj_norm.ln() - q.det_leading.ln() - k.ln()) / (nm - 1) as f64).exp())
}

/// Finite-sample estimate of `max |dl| / eps` over random members of the
/// boundary of `B(P, eps, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCond {
    pub max_ratio: f64,
    pub samples: usize,
}

/// Draws `samples` perturbations (seed `seed`, disjoint substream ranges per
/// sample) and tracks the eigenvalue of each `Q` nearest `lambda0`.
pub fn empirical_cond(
    p: &MatrixPolynomial,
    w: &WeightSet,
    lambda0: Complex64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<EmpiricalCond> {
    let mut max_ratio = 0.0f64;
    for s in 0..samples {
        let (q, _) = random_perturbation_at(p, eps, w, seed, s as u64 * MAX_RETRIES)?;
        let moved = eigenvalues(&q.materialize()?)?
            .iter()
            .map(|z| (z - lambda0).norm())
            .fold(f64::INFINITY, f64::min);
        max_ratio = max_ratio.max(moved / eps);
    }
    Ok(EmpiricalCond { max_ratio, samples })
}
