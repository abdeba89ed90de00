//! The weighted ball `B(P, eps, w) = { P + Delta : ||Delta_j|| <= eps w_j }`,
//! seeded random members of it, and the explicit perturbation that turns a
//! simple eigenvalue into a multiple one.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{PolyError, Result};
use crate::poly::{singular_values, spectral_norm, svd, CMatrix, CVector, MatrixPolynomial, WeightSet};
use crate::spectra::eigenvalues;
use crate::Complex64;

/// Absolute tolerance on `||Delta_j|| <= eps w_j`.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// Number of substreams tried before giving up on a nonsingular `A_m + Delta_m`.
pub const MAX_RETRIES: u64 = 16;

/// `Q = P + Delta` with the radius it was built for.
#[derive(Debug, Clone)]
pub struct PerturbedPolynomial<'a> {
    base: &'a MatrixPolynomial,
    weights: &'a WeightSet,
    deltas: Vec<CMatrix>,
    eps_used: f64,
}

impl<'a> PerturbedPolynomial<'a> {
    pub fn new(base: &'a MatrixPolynomial, weights: &'a WeightSet, deltas: Vec<CMatrix>, eps_used: f64) -> Result<Self> {
        weights.check_matches(base)?;
        if deltas.len() != base.degree() + 1 || deltas.iter().any(|d| d.shape() != (base.n(), base.n())) {
            return Err(PolyError::DimensionMismatch(format!(
                "expected {} perturbation matrices of size {n}x{n}",
                base.degree() + 1,
                n = base.n()
            )));
        }
        Ok(Self {
            base,
            weights,
            deltas,
            eps_used,
        })
    }

    pub fn base(&self) -> &MatrixPolynomial {
        self.base
    }

    pub fn weights(&self) -> &WeightSet {
        self.weights
    }

    pub fn deltas(&self) -> &[CMatrix] {
        &self.deltas
    }

    pub fn eps_used(&self) -> f64 {
        self.eps_used
    }

    /// `Delta(z)`.
    pub fn delta_eval(&self, z: Complex64) -> CMatrix {
        let mut acc = self.deltas[self.deltas.len() - 1].clone();
        for d in self.deltas.iter().rev().skip(1) {
            acc = acc * z + d;
        }
        acc
    }

    /// `Q` as a polynomial in its own right. Fails if `A_m + Delta_m` is
    /// numerically singular.
    pub fn materialize(&self) -> Result<MatrixPolynomial> {
        let coeffs = self
            .base
            .coeffs()
            .iter()
            .zip(&self.deltas)
            .map(|(a, d)| a + d)
            .collect();
        MatrixPolynomial::new(coeffs)
    }
}

/// Per-coefficient comparison of `||Delta_j||` against `eps w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    pub delta_norms: Vec<f64>,
    /// `eps w_j - ||Delta_j||`; negative entries violate the cap.
    pub slack: Vec<f64>,
}

impl Admissibility {
    /// Indices with `|slack| <= tol`, excluding coefficients with zero cap.
    pub fn tight(&self, tol: f64) -> Vec<usize> {
        self.slack
            .iter()
            .zip(&self.delta_norms)
            .enumerate()
            .filter(|(_, (s, d))| s.abs() <= tol && **d > 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

fn admissibility(deltas: &[CMatrix], eps: f64, w: &WeightSet) -> Admissibility {
    let delta_norms: Vec<f64> = deltas.iter().map(spectral_norm).collect();
    let slack: Vec<f64> = delta_norms.iter().zip(w.as_slice()).map(|(d, wj)| eps * wj - d).collect();
    Admissibility {
        admissible: slack.iter().all(|&s| s >= -ADMISSIBILITY_TOL),
        delta_norms,
        slack,
    }
}

/// Whether `Q` lies in `B(P, eps, w)`.
pub fn is_admissible(p: &MatrixPolynomial, q: &MatrixPolynomial, eps: f64, w: &WeightSet) -> Result<Admissibility> {
    w.check_matches(p)?;
    if q.n() != p.n() || q.degree() != p.degree() {
        return Err(PolyError::DimensionMismatch(format!(
            "P is {n}x{n} of degree {}, Q is {k}x{k} of degree {}",
            p.degree(),
            q.degree(),
            n = p.n(),
            k = q.n()
        )));
    }
    let deltas: Vec<CMatrix> = q.coeffs().iter().zip(p.coeffs()).map(|(b, a)| b - a).collect();
    Ok(admissibility(&deltas, eps, w))
}

impl PerturbedPolynomial<'_> {
    pub fn admissibility(&self, eps: f64) -> Admissibility {
        admissibility(&self.deltas, eps, self.weights)
    }
}

/// Unitary `V` with `V e_1 = x` for unit `x`: a Householder reflector that
/// sends `x` to `e^{i theta} e_1`, followed by the phase on the first column.
pub fn unitary_with_first_column(x: &CVector) -> CMatrix {
    let n = x.len();
    let x = x.normalize();
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 {
        x0 / x0.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut v = x.clone();
    v[0] -= phase;
    let vv = v.norm_squared();
    let mut h = CMatrix::identity(n, n);
    if vv > 1e-30 {
        h -= (&v * v.adjoint()) * Complex64::new(2.0 / vv, 0.0);
    }
    let mut out = h;
    let mut first = out.column_mut(0);
    first *= phase;
    out
}

/// Evidence that `lambda0` is a multiple eigenvalue of `Q`. Any one of the
/// three criteria suffices.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityCertificate {
    /// Distance from `lambda0` to the second-nearest eigenvalue of `Q`.
    pub pairing_gap: f64,
    pub pairing_tol: f64,
    /// Number of singular values of `Q(lambda0)` at or below `rank_tol`.
    pub rank_drop: usize,
    pub rank_tol: f64,
    /// `min_z ||Q(lambda0)(-z) + Q'(lambda0) x||`.
    pub chain_residual: f64,
    pub chain_tol: f64,
}

impl MultiplicityCertificate {
    pub fn by_pairing(&self) -> bool {
        self.pairing_gap <= self.pairing_tol
    }

    pub fn by_rank_drop(&self) -> bool {
        self.rank_drop >= 2
    }

    /// `Q(lambda0) x = 0` and a second chain vector exists.
    pub fn by_chain(&self) -> bool {
        self.rank_drop >= 1 && self.chain_residual <= self.chain_tol
    }

    pub fn is_certified(&self) -> bool {
        self.by_pairing() || self.by_rank_drop() || self.by_chain()
    }
}

/// Output of [`defect_perturbation`].
#[derive(Debug, Clone)]
pub struct DefectPerturbation<'a> {
    pub perturbed: PerturbedPolynomial<'a>,
    /// `Delta(lambda0)`, the single matrix every `Delta_j` is a multiple of.
    pub delta_hat: CMatrix,
    pub certificate: MultiplicityCertificate,
}

/// Builds `Q in B(P, eps_used, w)` having `lambda0` as a multiple eigenvalue,
/// with `eps_used = ||Delta_hat|| / w(|lambda0|)` no larger than
/// [`crate::bounds::dist_mult_bound`].
///
/// With `V e_1 = x`, the frame `P V` has zero first column at `lambda0`.
/// There `M = P'(lambda0)^{-1} P(lambda0) = [[0, a*], [0, A]]` and
/// `y* P'(lambda0) = [delta, w*]`; the rank-one correction
/// `[[0, 0], [0, delta/(w*w) w a*]]` makes `0` a multiple eigenvalue of `M`.
pub fn defect_perturbation<'a>(
    p: &'a MatrixPolynomial,
    w: &'a WeightSet,
    lambda0: Complex64,
    x: &CVector,
    y: &CVector,
) -> Result<DefectPerturbation<'a>> {
    w.check_matches(p)?;
    let n = p.n();
    if n < 2 {
        return Err(PolyError::InvalidInput(
            "a scalar polynomial has no perturbation of this form".into(),
        ));
    }
    let x = x.normalize();
    let y = y.normalize();
    let v = unitary_with_first_column(&x);
    let dp = p.eval_derivative(lambda0, 1);
    let sv = singular_values(&dp);
    if !(sv[n - 1] > 1e-14 * sv[0]) {
        return Err(PolyError::SingularDerivative(lambda0));
    }
    let dpv = &dp * &v;
    let pv = p.eval(lambda0) * &v;
    let m = dpv
        .clone()
        .lu()
        .solve(&pv)
        .ok_or(PolyError::SingularDerivative(lambda0))?;
    let row = y.adjoint() * &dpv;
    let delta = row[0];
    let wvec: CVector = row.columns(1, n - 1).adjoint();
    let ww = wvec.norm_squared();
    if !(ww > 1e-12 * row.norm_squared()) {
        return Err(PolyError::ParallelVectors { z: lambda0, gap: ww });
    }
    let a = CVector::from_iterator(n - 1, (1..n).map(|j| m[(0, j)].conj()));
    if a.norm() == 0.0 {
        return Err(PolyError::Perturbation("first row of P'(z)^{-1} P(z) vanishes".into()));
    }
    let mut e = CMatrix::zeros(n, n);
    e.view_mut((1, 1), (n - 1, n - 1))
        .copy_from(&(&wvec * a.adjoint() * (delta / ww)));
    let delta_hat = &dpv * e * v.adjoint();

    let r = lambda0.norm();
    let wr = w.eval(r, 0);
    let direction = if r > 0.0 {
        lambda0.conj() / r
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mut factor = Complex64::new(1.0, 0.0);
    let mut deltas = Vec::with_capacity(p.degree() + 1);
    for j in 0..=p.degree() {
        deltas.push(&delta_hat * (factor * (w.get(j) / wr)));
        factor *= direction;
    }
    let eps_used = spectral_norm(&delta_hat) / wr;
    let perturbed = PerturbedPolynomial::new(p, w, deltas, eps_used)?;
    let certificate = certify_multiple(&perturbed, lambda0, &x)?;
    Ok(DefectPerturbation {
        perturbed,
        delta_hat,
        certificate,
    })
}

fn certify_multiple(q: &PerturbedPolynomial<'_>, lambda0: Complex64, x: &CVector) -> Result<MultiplicityCertificate> {
    let qp = q.materialize()?;
    let scale = lambda0.norm().max(1.0);
    let mut dists: Vec<f64> = eigenvalues(&qp)?.iter().map(|z| (z - lambda0).norm()).collect();
    dists.sort_by(f64::total_cmp);
    let pairing_gap = dists.get(1).copied().unwrap_or(f64::INFINITY);
    let pairing_tol = 1e-6 * scale;

    let q0 = qp.eval(lambda0);
    let (u, s, _) = svd(&q0);
    let rank_tol = 1e-8 * s[0].max(f64::MIN_POSITIVE);
    let rank_drop = s.iter().filter(|&&v| v <= rank_tol).count();

    let rhs = qp.eval_derivative(lambda0, 1) * x;
    let range = s.iter().filter(|&&v| v > rank_tol).count();
    let ur = u.columns(0, range);
    let chain_residual = (&rhs - ur * (ur.adjoint() * &rhs)).norm();

    let scale = qp.norm_inf() * scale.powi(qp.degree() as i32);
    Ok(MultiplicityCertificate {
        pairing_gap,
        pairing_tol,
        rank_drop,
        rank_tol,
        chain_residual,
        chain_tol: 1e-8 * scale,
    })
}

fn gaussian_matrix(rng: &mut ChaCha20Rng, n: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    })
}

/// A random member of the boundary of `B(P, eps, w)`: every `Delta_j` is a
/// complex Gaussian matrix rescaled to `||Delta_j|| = eps w_j`.
///
/// Draws come from ChaCha20 keyed by `seed` on substream `stream`; if
/// `A_m + Delta_m` is singular the next substream is used, up to
/// [`MAX_RETRIES`] times. Returns the perturbation and the stream that produced it.
pub fn random_perturbation_at<'a>(
    p: &'a MatrixPolynomial,
    eps: f64,
    w: &'a WeightSet,
    seed: u64,
    stream: u64,
) -> Result<(PerturbedPolynomial<'a>, u64)> {
    w.check_matches(p)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(PolyError::InvalidInput(format!("eps = {eps} must be positive")));
    }
    let n = p.n();
    for attempt in 0..MAX_RETRIES {
        let s = stream.wrapping_add(attempt);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(s);
        let deltas: Vec<CMatrix> = w
            .as_slice()
            .iter()
            .map(|&wj| {
                let g = gaussian_matrix(&mut rng, n);
                if wj == 0.0 {
                    return CMatrix::zeros(n, n);
                }
                let norm = spectral_norm(&g);
                g * Complex64::new(eps * wj / norm, 0.0)
            })
            .collect();
        let q = PerturbedPolynomial::new(p, w, deltas, eps)?;
        if q.materialize().is_ok() {
            return Ok((q, s));
        }
    }
    Err(PolyError::Perturbation(format!(
        "A_m + Delta_m singular on {MAX_RETRIES} consecutive substreams from {stream}"
    )))
}

/// [`random_perturbation_at`] on substream 0.
pub fn random_perturbation<'a>(
    p: &'a MatrixPolynomial,
    eps: f64,
    w: &'a WeightSet,
    seed: u64,
) -> Result<PerturbedPolynomial<'a>> {
    random_perturbation_at(p, eps, w, seed, 0).map(|(q, _)| q)
}
