#![allow(dead_code)]

use polycond::poly::singular_values;
use polycond::spectra::eigenvalues;
use polycond::{CMatrix, Complex64, MatrixPolynomial, WeightSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(rng: &mut ChaCha20Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random polynomial with `n <= 3`, `m <= 3`, a well-conditioned leading
/// coefficient, and positive weights.
pub fn random_problem(rng: &mut ChaCha20Rng) -> (MatrixPolynomial, WeightSet) {
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=3);
    let mut coeffs: Vec<CMatrix> = (0..=m).map(|_| gaussian(rng, n)).collect();
    coeffs[m] += CMatrix::identity(n, n) * c(2.0, 0.0);
    let weights = (0..=m).map(|_| rng.random_range(0.5..2.0)).collect();
    (
        MatrixPolynomial::new(coeffs).expect("shifted leading coefficient is nonsingular"),
        WeightSet::new(weights).expect("positive weights"),
    )
}

/// Like [`random_problem`], redrawn until every eigenvalue is separated
/// from the others by at least `0.05 max(1, |l|)` and `P(l)` has a
/// singular-value gap at each eigenvalue.
pub fn well_separated(rng: &mut ChaCha20Rng) -> (MatrixPolynomial, WeightSet) {
    loop {
        let (p, w) = random_problem(rng);
        let ev = eigenvalues(&p).expect("eigensolve");
        let separated = ev.iter().enumerate().all(|(i, a)| {
            ev.iter()
                .enumerate()
                .all(|(j, b)| i == j || (a - b).norm() >= 0.05 * a.norm().max(1.0))
        });
        let gapped = p.n() == 1
            || ev.iter().all(|&z| {
                let s = singular_values(&p.eval(z));
                s[p.n() - 2] > 1e-3 * s[0]
            });
        if separated && gapped {
            return (p, w);
        }
    }
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Adjugate by cofactors: `adj(A)_{ij} = (-1)^{i+j} det(A without row j, column i)`.
pub fn cofactor_adjugate(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    if n == 1 {
        return CMatrix::identity(1, 1);
    }
    CMatrix::from_fn(n, n, |i, j| {
        let minor = a.clone().remove_row(j).remove_column(i);
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        minor.determinant() * sign
    })
}

/// Roots of `det P` from its values on a circle: the coefficients come from
/// a discrete Fourier transform of `nm + 1` samples, the roots from
/// Durand-Kerner iteration.
pub fn det_roots(p: &MatrixPolynomial) -> Vec<Complex64> {
    let deg = p.nm();
    let count = deg + 1;
    let radius = 1.0 + p.coeffs().iter().map(|a| a.norm()).sum::<f64>() / p.leading().norm();
    let r = radius.sqrt();
    let samples: Vec<Complex64> = (0..count)
        .map(|k| {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / count as f64);
            p.eval(z).determinant()
        })
        .collect();
    let coeffs: Vec<Complex64> = (0..count)
        .map(|j| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / count as f64))
                .sum();
            s / (count as f64 * r.powi(j as i32))
        })
        .collect();
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|a| a / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| c(0.4, 0.9).powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = c(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    roots
}

/// Largest distance in a greedy nearest-neighbour pairing of two multisets.
pub fn pairing_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst = 0.0f64;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}
