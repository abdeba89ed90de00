//! Upper bounds on the distance from a simple eigenvalue to multiplicity, and
//! on how far eigenvalues of a perturbed polynomial can move: an Elsner-type
//! bound through `det P` and a Bauer-Fike-type bound through a Jordan triple.

use crate::condition::{adjugate_quotient, cond_simple};
use crate::error::{PolyError, Result};
use crate::poly::{singular_values, spectral_norm, CVector, MatrixPolynomial, WeightSet};
use crate::spectra::{eigenproblem_cond, JordanTriple, Spectrum};
use crate::Complex64;

/// Conditions attached to a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFlag {
    /// The bound holds for `mu` in the spectrum of some `Q` in the ball; the
    /// caller has not established that.
    HypothesisUnverified,
    /// `theta >= 1`, so the Bauer-Fike bound is `theta`.
    ThetaAtLeastOne,
    /// `theta < 1`, so the Bauer-Fike bound is `theta^{1/p}`.
    ThetaBelowOne,
}

/// A bound with the named quantities it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub ingredients: Vec<(&'static str, f64)>,
    pub flags: Vec<BoundFlag>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.ingredients.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

struct Frame {
    c_dp: f64,
    p_norm: f64,
    delta: Complex64,
    row_norm: f64,
    gap: f64,
}

fn frame(p: &MatrixPolynomial, lambda0: Complex64, x: &CVector, y: &CVector) -> Result<Frame> {
    let dp = p.eval_derivative(lambda0, 1);
    let s = singular_values(&dp);
    let n = s.len();
    if !(s[n - 1] > 1e-14 * s[0]) {
        return Err(PolyError::SingularDerivative(lambda0));
    }
    let x = x.normalize();
    let y = y.normalize();
    let row = y.adjoint() * &dp;
    let delta = (&row * &x)[0];
    let row_sq = row.norm_squared();
    let gap = row_sq - delta.norm_sqr();
    if !(gap > 1e-12 * row_sq) {
        return Err(PolyError::ParallelVectors { z: lambda0, gap });
    }
    Ok(Frame {
        c_dp: s[0] / s[n - 1],
        p_norm: spectral_norm(&p.eval(lambda0)),
        delta,
        row_norm: row_sq.sqrt(),
        gap,
    })
}

fn dist_report(f: Frame, k: f64) -> BoundReport {
    BoundReport {
        value: f.c_dp * f.p_norm / (k * f.gap.sqrt()),
        ingredients: vec![
            ("c_dp", f.c_dp),
            ("p_norm", f.p_norm),
            ("k", k),
            ("delta_re", f.delta.re),
            ("delta_im", f.delta.im),
            ("delta_abs", f.delta.norm()),
            ("row_norm", f.row_norm),
        ],
        flags: Vec::new(),
    }
}

/// `c(P'(l)) ||P(l)|| / (k(P, l) (||y* P'(l)||^2 - |y* P'(l) x|^2)^{1/2})`,
/// an upper bound on the smallest `eps` for which some member of
/// `B(P, eps, w)` has `l` as a multiple eigenvalue.
pub fn dist_mult_bound(
    p: &MatrixPolynomial,
    w: &WeightSet,
    lambda0: Complex64,
    x: &CVector,
    y: &CVector,
) -> Result<BoundReport> {
    w.check_matches(p)?;
    let f = frame(p, lambda0, x, y)?;
    let k = cond_simple(p, w, lambda0, &x.normalize(), &y.normalize())?;
    Ok(dist_report(f, k))
}

/// [`dist_mult_bound`] with `k(P, l_i)` replaced by its eigenvector-free
/// expression.
pub fn dist_mult_bound_adj(
    p: &MatrixPolynomial,
    w: &WeightSet,
    i: usize,
    spec: &Spectrum,
    x: &CVector,
    y: &CVector,
) -> Result<BoundReport> {
    let q = adjugate_quotient(p, w, i, spec)?;
    let f = frame(p, q.eigenvalue, x, y)?;
    let mut r = dist_report(f, q.cond());
    r.ingredients.push(("adj_norm", q.adj_norm));
    r.ingredients.push(("gap_product", q.gap_product()));
    r.ingredients.push(("det_leading", q.det_leading));
    Ok(r)
}

/// `(eps w(|mu|) / |det A_m|)^{1/mn} ||P(mu)||^{1 - 1/mn}`, bounding the
/// distance from `mu` to the spectrum of `P` when `mu` is an eigenvalue of
/// some `Q` in `B(P, eps, w)`.
pub fn elsner_bound(p: &MatrixPolynomial, w: &WeightSet, eps: f64, mu: Complex64) -> Result<BoundReport> {
    w.check_matches(p)?;
    check_eps(eps)?;
    let big_n = p.nm() as f64;
    let wmu = w.eval(mu.norm(), 0);
    let det = p.det_leading().norm();
    let p_norm = spectral_norm(&p.eval(mu));
    let value = if p_norm == 0.0 && big_n > 1.0 {
        0.0
    } else {
        ((eps * wmu / det).ln() / big_n + p_norm.ln() * (1.0 - 1.0 / big_n)).exp()
    };
    Ok(BoundReport {
        value,
        ingredients: vec![("w_mu", wmu), ("det_leading", det), ("p_norm", p_norm), ("mn", big_n)],
        flags: vec![BoundFlag::HypothesisUnverified],
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(PolyError::InvalidInput(format!("eps = {eps} must be positive")))
    }
}

fn check_triple(p: &MatrixPolynomial, t: &JordanTriple) -> Result<()> {
    if t.x().shape() != (p.n(), p.nm()) || t.y().shape() != (p.nm(), p.n()) {
        return Err(PolyError::InvalidTriple(format!(
            "X is {}x{}, Y is {}x{}; expected {n}x{nm} and {nm}x{n}",
            t.x().nrows(),
            t.x().ncols(),
            t.y().nrows(),
            t.y().ncols(),
            n = p.n(),
            nm = p.nm()
        )));
    }
    Ok(())
}

/// `max(theta, theta^{1/p})` with `theta = p k(P) eps w(|mu|)` and `p` the
/// largest Jordan block of `T`.
pub fn bauer_fike_bound(
    p: &MatrixPolynomial,
    w: &WeightSet,
    eps: f64,
    mu: Complex64,
    t: &JordanTriple,
) -> Result<BoundReport> {
    w.check_matches(p)?;
    check_eps(eps)?;
    check_triple(p, t)?;
    let pmax = t.max_block_size() as f64;
    let k = eigenproblem_cond(t);
    let wmu = w.eval(mu.norm(), 0);
    let theta = pmax * k * eps * wmu;
    let flag = if theta >= 1.0 {
        BoundFlag::ThetaAtLeastOne
    } else {
        BoundFlag::ThetaBelowOne
    };
    Ok(BoundReport {
        value: theta.max(theta.powf(1.0 / pmax)),
        ingredients: vec![("p", pmax), ("k", k), ("w_mu", wmu), ("theta", theta)],
        flags: vec![flag],
    })
}

/// Which of [`elsner_bound`] and [`bauer_fike_bound`] is smaller, decided by
/// `||P(mu)||` against `Omega^{1/(mn-1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub omega: f64,
    pub log_omega: f64,
    pub threshold: f64,
    pub p_norm: f64,
    pub elsner_tighter: bool,
    pub elsner: BoundReport,
    pub bauer_fike: BoundReport,
}

/// `Omega = |det A_m| (p k)^N (eps w)^{N-1}` if `theta >= 1` and
/// `|det A_m| (p k)^{N/p} (eps w)^{N/p - 1}` otherwise, with `N = mn`.
pub fn bound_comparator(
    p: &MatrixPolynomial,
    w: &WeightSet,
    eps: f64,
    mu: Complex64,
    t: &JordanTriple,
) -> Result<Comparison> {
    let big_n = p.nm();
    if big_n == 1 {
        return Err(PolyError::DegenerateExponent("mn = 1 leaves no exponent 1/(mn - 1)".into()));
    }
    let elsner = elsner_bound(p, w, eps, mu)?;
    let bauer_fike = bauer_fike_bound(p, w, eps, mu, t)?;
    let nf = big_n as f64;
    let pk = bauer_fike.get("p").unwrap_or(1.0) * bauer_fike.get("k").unwrap_or(1.0);
    let pmax = bauer_fike.get("p").unwrap_or(1.0);
    let ew = eps * bauer_fike.get("w_mu").unwrap_or(1.0);
    let theta = bauer_fike.get("theta").unwrap_or(0.0);
    let det = p.det_leading().norm();
    let log_omega = if theta >= 1.0 {
        det.ln() + nf * pk.ln() + (nf - 1.0) * ew.ln()
    } else {
        det.ln() + nf / pmax * pk.ln() + (nf / pmax - 1.0) * ew.ln()
    };
    let p_norm = elsner.get("p_norm").unwrap_or(0.0);
    let log_threshold = log_omega / (nf - 1.0);
    Ok(Comparison {
        omega: log_omega.exp(),
        log_omega,
        threshold: log_threshold.exp(),
        p_norm,
        elsner_tighter: p_norm.ln() < log_threshold,
        elsner,
        bauer_fike,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::CMatrix;
    use crate::spectra::{eig_vectors, JordanBlock};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn p4_distance_bounds() {
        let f = fixtures::p4();
        let spec = Spectrum::new(&f.poly).unwrap();
        // Reference values from an independent dense SVD evaluation of the formula.
        for (z, want) in [(c(-1.0, 0.0), 1.360553807566), (c(0.25, -3.8971), 0.693235181403)] {
            let i = spec.nearest(z);
            let l = spec.eigenvalues()[i];
            let v = eig_vectors(&f.poly, l).unwrap();
            let b = dist_mult_bound(&f.poly, &f.weights, l, &v.x, &v.y).unwrap();
            assert!((b.value - want).abs() <= 1e-8, "{z}: {}", b.value);
            let a = dist_mult_bound_adj(&f.poly, &f.weights, i, &spec, &v.x, &v.y).unwrap();
            assert!((a.value - b.value).abs() <= 1e-6 * b.value);
        }
    }

    #[test]
    fn p6_elsner_and_bauer_fike() {
        let f = fixtures::p6();
        let t = f.triple.unwrap();
        let mu = c(0.5691, 0.0043);
        let e = elsner_bound(&f.poly, &f.weights, 0.3, mu).unwrap();
        assert!((e.value - 0.8554).abs() <= 1e-3, "{}", e.value);
        let b = bauer_fike_bound(&f.poly, &f.weights, 0.3, mu, &t).unwrap();
        assert!((b.value - 3.8240).abs() <= 1e-3, "{}", b.value);
        assert_eq!(b.flags, vec![BoundFlag::ThetaAtLeastOne]);
        let cmp = bound_comparator(&f.poly, &f.weights, 0.3, mu, &t).unwrap();
        assert!(cmp.elsner_tighter);
    }

    #[test]
    fn elsner_shrinks_with_eps() {
        let f = fixtures::p6();
        let mu = c(0.3, 0.2);
        let mut last = f64::INFINITY;
        for eps in [1.0, 0.1, 1e-3, 1e-6] {
            let v = elsner_bound(&f.poly, &f.weights, eps, mu).unwrap().value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn classical_bauer_fike_shape() {
        let p = MatrixPolynomial::from_real(2, &[&[-1.0, 0.0, 0.0, -3.0], &[1.0, 0.0, 0.0, 1.0]]).unwrap();
        let w = WeightSet::ones(1);
        let blocks = vec![
            JordanBlock {
                eigenvalue: c(1.0, 0.0),
                size: 1,
            },
            JordanBlock {
                eigenvalue: c(3.0, 0.0),
                size: 1,
            },
        ];
        let t = JordanTriple::new(CMatrix::identity(2, 2), blocks, CMatrix::identity(2, 2)).unwrap();
        let mu = c(0.5, 0.5);
        let b = bauer_fike_bound(&p, &w, 0.01, mu, &t).unwrap();
        assert!((b.value - 0.01 * w.eval(mu.norm(), 0)).abs() < 1e-15);
    }

    #[test]
    fn comparator_branches_agree_at_theta_one() {
        let f = fixtures::p6();
        let t = f.triple.unwrap();
        let mu = c(0.2, 0.1);
        let k = eigenproblem_cond(&t);
        let eps = 1.0 / (2.0 * k * f.weights.eval(mu.norm(), 0));
        let at = bound_comparator(&f.poly, &f.weights, eps, mu, &t).unwrap();
        let below = bound_comparator(&f.poly, &f.weights, eps * (1.0 - 1e-12), mu, &t).unwrap();
        assert!((at.log_omega - below.log_omega).abs() < 1e-9);
    }

    #[test]
    fn comparator_needs_two_eigenvalues() {
        let p = MatrixPolynomial::from_real(1, &[&[-2.0], &[1.0]]).unwrap();
        let w = WeightSet::ones(1);
        let t = JordanTriple::new(
            CMatrix::identity(1, 1),
            vec![JordanBlock {
                eigenvalue: c(2.0, 0.0),
                size: 1,
            }],
            CMatrix::identity(1, 1),
        )
        .unwrap();
        assert!(matches!(
            bound_comparator(&p, &w, 0.1, c(2.1, 0.0), &t),
            Err(PolyError::DegenerateExponent(_))
        ));
    }
}
