//! Block companion linearization and the unimodular factors `E(z)`, `F(z)` with
//! `E(z) (zI - C_P) F(z) = diag(P(z), I)`.

use crate::error::{PolyError, Result};
use crate::poly::{spectral_norm, CMatrix, MatrixPolynomial};
use crate::Complex64;

/// The `nm x nm` block companion matrix of a matrix polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionMatrix {
    matrix: CMatrix,
    n: usize,
    m: usize,
}

impl CompanionMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Builds `C_P`. The last block row `-A_m^{-1} [A_0 ... A_{m-1}]` comes from a
/// single LU solve against `A_m`.
pub fn companion(p: &MatrixPolynomial) -> Result<CompanionMatrix> {
    let (n, m) = (p.n(), p.degree());
    let nm = n * m;
    let mut c = CMatrix::zeros(nm, nm);
    for blk in 0..m - 1 {
        for k in 0..n {
            c[(blk * n + k, (blk + 1) * n + k)] = Complex64::new(1.0, 0.0);
        }
    }
    let mut rhs = CMatrix::zeros(n, nm);
    for j in 0..m {
        rhs.view_mut((0, j * n), (n, n)).copy_from(p.coeff(j));
    }
    let lu = p.leading().clone().lu();
    if !lu.solve_mut(&mut rhs) {
        return Err(PolyError::SingularLeading {
            s_min: 0.0,
            s_max: spectral_norm(p.leading()),
        });
    }
    c.view_mut(((m - 1) * n, 0), (n, nm)).copy_from(&(-rhs));
    Ok(CompanionMatrix { matrix: c, n, m })
}

/// Horner partial sums `E_m = A_m`, `E_r = A_r + z E_{r+1}`; returned as
/// `[E_1, ..., E_m]`.
pub fn horner_blocks(p: &MatrixPolynomial, z: Complex64) -> Vec<CMatrix> {
    let m = p.degree();
    let mut out = vec![p.leading().clone(); m];
    for r in (1..m).rev() {
        out[r - 1] = p.coeff(r) + &out[r] * z;
    }
    out
}

/// `(E(z), F(z))`. `F` is unit lower block-triangular with `(i, j)` block
/// `z^{i-j} I`; `E` carries `[E_1 ... E_m]` in its first block row and `-I`
/// on the block subdiagonal.
pub fn ef_factors(p: &MatrixPolynomial, z: Complex64) -> (CMatrix, CMatrix) {
    let (n, m) = (p.n(), p.degree());
    let nm = n * m;
    let blocks = horner_blocks(p, z);
    let mut e = CMatrix::zeros(nm, nm);
    for (r, blk) in blocks.iter().enumerate() {
        e.view_mut((0, r * n), (n, n)).copy_from(blk);
    }
    for r in 1..m {
        for k in 0..n {
            e[(r * n + k, (r - 1) * n + k)] = Complex64::new(-1.0, 0.0);
        }
    }
    let mut f = CMatrix::zeros(nm, nm);
    for i in 0..m {
        let mut power = Complex64::new(1.0, 0.0);
        for j in (0..=i).rev() {
            for k in 0..n {
                f[(i * n + k, j * n + k)] = power;
            }
            power *= z;
        }
    }
    (e, f)
}

/// Spectral norm of `E(z)(zI - C_P)F(z) - diag(P(z), I)`.
pub fn linearization_residual(p: &MatrixPolynomial, z: Complex64) -> Result<f64> {
    let (n, nm) = (p.n(), p.nm());
    let c = companion(p)?;
    let (e, f) = ef_factors(p, z);
    let shifted = CMatrix::identity(nm, nm) * z - c.matrix();
    let lhs = e * shifted * f;
    let mut target = CMatrix::identity(nm, nm);
    target.view_mut((0, 0), (n, n)).copy_from(&p.eval(z));
    Ok(spectral_norm(&(lhs - target)))
}
