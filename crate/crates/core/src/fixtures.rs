//! Reference problems with known spectra, Jordan triples and condition numbers.
//!
//! * [`p3`]: 3x3 quadratic with a five-fold eigenvalue at 1 (Jordan blocks 2, 2, 1)
//!   and a simple eigenvalue at -1.
//! * [`p4`]: 3x3 monic quadratic with six simple eigenvalues
//!   `{0, -1, 0.25 +- 3.8971i, +-5i}`.
//! * [`p5`]: 2x2 quadratic with ill-scaled leading coefficient and simple
//!   eigenvalues 1, 2, 3, 4.
//! * [`p6`]: 2x2 monic cubic with `det P = z^2 (z+1)^2 (z-1)^2`, plus a
//!   perturbation on the boundary of the weighted ball at `eps = 0.3`.

use crate::poly::{CMatrix, MatrixPolynomial, WeightSet};
use crate::spectra::{JordanBlock, JordanTriple};
use crate::Complex64;

/// Data attached to a multiple eigenvalue: eigenvector matrices of the
/// maximal Jordan blocks and the maximal block size `p0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipleEigenData {
    pub eigenvalue: Complex64,
    pub xhat: CMatrix,
    pub yhat: CMatrix,
    pub p0: usize,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub poly: MatrixPolynomial,
    pub weights: WeightSet,
    pub triple: Option<JordanTriple>,
    pub multiple: Option<MultipleEigenData>,
    /// A perturbed polynomial printed alongside the problem, if any.
    pub perturbed: Option<MatrixPolynomial>,
    /// Exact eigenvalues with multiplicity.
    pub eigenvalues: Vec<Complex64>,
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&v| re(v)))
}

fn blocks(spec: &[(f64, usize)]) -> Vec<JordanBlock> {
    spec.iter()
        .map(|&(e, size)| JordanBlock {
            eigenvalue: re(e),
            size,
        })
        .collect()
}

/// `P(z) = [[(z-1)^2, z-1, z-1], [0, (z-1)^2, 0], [0, z^2-1, z^2-1]]`.
pub fn p3() -> Fixture {
    let poly = MatrixPolynomial::from_real(
        3,
        &[
            &[1.0, -1.0, -1.0, 0.0, 1.0, 0.0, 0.0, -1.0, -1.0],
            &[-2.0, 1.0, 1.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0],
        ],
    )
    .expect("P3 is well formed");
    let x = real_matrix(
        3,
        6,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 1.0, //
            0.0, 1.0, 1.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, -1.0, 1.0, 0.0, 2.0,
        ],
    );
    let y = real_matrix(
        6,
        3,
        &[
            0.0, 0.0, 0.25, //
            1.0, 0.0, -0.5, //
            0.0, 1.0, -0.5, //
            0.0, 1.0, 0.0, //
            -1.0, -1.0, 1.0, //
            0.0, 0.0, -0.25,
        ],
    );
    let triple = JordanTriple::new(x, blocks(&[(1.0, 2), (1.0, 2), (1.0, 1), (-1.0, 1)]), y)
        .expect("P3 triple is well formed");
    let multiple = MultipleEigenData {
        eigenvalue: re(1.0),
        xhat: real_matrix(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, -1.0]),
        yhat: real_matrix(2, 3, &[1.0, 0.0, -0.5, 0.0, 1.0, 0.0]),
        p0: 2,
    };
    Fixture {
        name: "p3",
        poly,
        weights: WeightSet::ones(2),
        triple: Some(triple),
        multiple: Some(multiple),
        perturbed: None,
        eigenvalues: vec![re(1.0); 5].into_iter().chain([re(-1.0)]).collect(),
    }
}

/// `P(z) = I z^2 + A_1 z + A_0` with upper-triangular `A_0`, `A_1`.
pub fn p4() -> Fixture {
    let i = Complex64::i();
    let a0 = CMatrix::from_row_slice(
        3,
        3,
        &[re(0.0), re(0.0), re(8.0), re(0.0), re(25.0), -i, re(0.0), re(0.0), re(15.25)],
    );
    let a1 = real_matrix(3, 3, &[1.0, 0.0, 2.0, 0.0, 0.0, 0.25, 0.0, 0.0, -0.5]);
    let poly = MatrixPolynomial::new(vec![a0, a1, CMatrix::identity(3, 3)]).expect("P4 is well formed");
    let (weights, _) = WeightSet::from_norms(&poly);
    let im = (15.25f64 - 0.0625).sqrt();
    Fixture {
        name: "p4",
        poly,
        weights,
        triple: None,
        multiple: None,
        perturbed: None,
        eigenvalues: vec![
            re(0.0),
            re(-1.0),
            Complex64::new(0.25, im),
            Complex64::new(0.25, -im),
            Complex64::new(0.0, 5.0),
            Complex64::new(0.0, -5.0),
        ],
    }
}

/// `P(z) = diag(0.001, 1) z^2 + diag(-0.003, -7) z + [[0.002, 0.001], [0, 12]]`.
pub fn p5() -> Fixture {
    let poly = MatrixPolynomial::from_real(
        2,
        &[&[0.002, 0.001, 0.0, 12.0], &[-0.003, 0.0, 0.0, -7.0], &[0.001, 0.0, 0.0, 1.0]],
    )
    .expect("P5 is well formed");
    Fixture {
        name: "p5",
        poly,
        weights: WeightSet::ones(2),
        triple: None,
        multiple: None,
        perturbed: None,
        eigenvalues: vec![re(1.0), re(2.0), re(3.0), re(4.0)],
    }
}

/// `P(z) = I z^3 + [[0, sqrt2], [sqrt2, 0]] z^2 + [[0, -1], [1, 0]] z`.
pub fn p6() -> Fixture {
    let s2 = std::f64::consts::SQRT_2;
    let poly = MatrixPolynomial::from_real(
        2,
        &[&[0.0; 4], &[0.0, -1.0, 1.0, 0.0], &[0.0, s2, s2, 0.0], &[1.0, 0.0, 0.0, 1.0]],
    )
    .expect("P6 is well formed");
    let x = real_matrix(
        2,
        6,
        &[
            1.0,
            0.0,
            1.0 - s2,
            s2 - 2.0,
            s2 + 1.0,
            s2 + 2.0,
            0.0,
            1.0,
            1.0,
            0.0,
            1.0,
            0.0,
        ],
    );
    let y_t = real_matrix(
        2,
        6,
        &[
            0.0,
            -4.0,
            s2 + 2.0,
            -s2 - 1.0,
            -s2 + 2.0,
            -s2 + 1.0,
            4.0,
            0.0,
            0.0,
            1.0,
            0.0,
            -1.0,
        ],
    );
    let y = y_t.transpose() * re(0.25);
    let triple = JordanTriple::new(x, blocks(&[(0.0, 1), (0.0, 1), (1.0, 2), (-1.0, 2)]), y)
        .expect("P6 triple is well formed");
    let i = Complex64::i();
    let q = MatrixPolynomial::new(vec![
        real_matrix(2, 2, &[0.01, 0.0, 0.0, 0.03]),
        real_matrix(2, 2, &[0.0, -0.7, 0.7, 0.0]),
        CMatrix::from_row_slice(2, 2, &[i * 0.3, re(s2), re(s2), -i * 0.3]),
        CMatrix::identity(2, 2),
    ])
    .expect("P6 perturbation is well formed");
    Fixture {
        name: "p6",
        poly,
        weights: WeightSet::new(vec![0.1, 1.0, 1.0, 0.0]).expect("valid weights"),
        triple: Some(triple),
        multiple: None,
        perturbed: Some(q),
        eigenvalues: [0.0, 0.0, 1.0, 1.0, -1.0, -1.0].into_iter().map(re).collect(),
    }
}

pub fn all() -> Vec<Fixture> {
    vec![p3(), p4(), p5(), p6()]
}
