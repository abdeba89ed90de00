//! Spectrum of a matrix polynomial: companion eigensolve, multiplicity
//! clusters, SVD-based eigenvectors, and Jordan triples.

use crate::error::{PolyError, Result};
use crate::linearization::{companion, horner_blocks};
use crate::poly::{dense_eigenvalues, singular_values, spectral_norm, svd, CMatrix, CVector, MatrixPolynomial};
use crate::Complex64;

/// Relative tolerance used to accept `z` as an eigenvalue in [`eig_vectors`]:
/// `s_min(P(z)) <= EIGENVALUE_RESIDUAL_TOL * ||P||_inf * max(1, |z|)^m`.
pub const EIGENVALUE_RESIDUAL_TOL: f64 = 1e-8;

/// A group of computed eigenvalues within the clustering tolerance of each
/// other (transitively).
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_simple(&self) -> bool {
        self.members.len() == 1
    }
}

/// Unit right and left eigenvectors taken from the smallest singular triple
/// of `P(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenVectors {
    pub x: CVector,
    pub y: CVector,
    pub s_min: f64,
}

/// All `nm` eigenvalues of `P` with their clusters and, for simple ones,
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    clusters: Vec<Cluster>,
    cluster_of: Vec<usize>,
    vectors: Vec<Option<EigenVectors>>,
    tolerance: f64,
}

impl Spectrum {
    /// Uses `1e-6 * max(1, spectral radius)` as the clustering tolerance.
    pub fn new(p: &MatrixPolynomial) -> Result<Self> {
        let values = eigenvalues(p)?;
        let tol = default_cluster_tolerance(&values);
        Self::build(p, values, tol)
    }

    pub fn with_tolerance(p: &MatrixPolynomial, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(PolyError::InvalidInput(format!("cluster tolerance {tol} must be positive")));
        }
        Self::build(p, eigenvalues(p)?, tol)
    }

    fn build(p: &MatrixPolynomial, values: Vec<Complex64>, tol: f64) -> Result<Self> {
        let clusters = cluster(&values, tol);
        let mut cluster_of = vec![0; values.len()];
        for (c, cl) in clusters.iter().enumerate() {
            for &i in &cl.members {
                cluster_of[i] = c;
            }
        }
        let vectors = values
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                if clusters[cluster_of[i]].is_simple() {
                    eig_vectors(p, z).ok()
                } else {
                    None
                }
            })
            .collect();
        Ok(Self {
            eigenvalues: values,
            clusters,
            cluster_of,
            vectors,
            tolerance: tol,
        })
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_of(&self, i: usize) -> &Cluster {
        &self.clusters[self.cluster_of[i]]
    }

    pub fn is_simple(&self, i: usize) -> bool {
        self.cluster_of(i).is_simple()
    }

    pub fn vectors(&self, i: usize) -> Option<&EigenVectors> {
        self.vectors[i].as_ref()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Index of the computed eigenvalue closest to `z`.
    pub fn nearest(&self, z: Complex64) -> usize {
        self.eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
            .map(|(i, _)| i)
            .expect("spectrum is never empty")
    }

    /// Fails unless eigenvalue `i` forms a cluster of its own.
    pub fn require_simple(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(PolyError::InvalidInput(format!(
                "eigenvalue index {i} out of range for {} eigenvalues",
                self.len()
            )));
        }
        let cl = self.cluster_of(i);
        if cl.is_simple() {
            Ok(())
        } else {
            Err(PolyError::NotSimple(
                self.eigenvalues[i],
                format!("cluster of size {} at tolerance {:e}", cl.size(), self.tolerance),
            ))
        }
    }
}

pub fn default_cluster_tolerance(values: &[Complex64]) -> f64 {
    let radius = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    1e-6 * radius.max(1.0)
}

/// Eigenvalues of the companion matrix, sorted by real part, then imaginary
/// part, then modulus.
pub fn eigenvalues(p: &MatrixPolynomial) -> Result<Vec<Complex64>> {
    let c = companion(p)?.into_matrix();
    let dim = c.nrows();
    let mut values = dense_eigenvalues(&c).ok_or(PolyError::EigenSolver(dim))?;
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(PolyError::EigenSolver(dim));
    }
    values.sort_by(|a, b| {
        a.re.total_cmp(&b.re)
            .then(a.im.total_cmp(&b.im))
            .then(a.norm().total_cmp(&b.norm()))
    });
    Ok(values)
}

/// Transitive-closure clustering: `i` and `j` share a cluster when a chain of
/// pairwise distances `<= tol` connects them. Clusters are ordered by their
/// smallest member index.
pub fn cluster(values: &[Complex64], tol: f64) -> Vec<Cluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut root_to_cluster = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_to_cluster[r] == usize::MAX {
            root_to_cluster[r] = clusters.len();
            clusters.push(Cluster {
                center: Complex64::new(0.0, 0.0),
                members: Vec::new(),
            });
        }
        clusters[root_to_cluster[r]].members.push(i);
    }
    for cl in &mut clusters {
        let sum: Complex64 = cl.members.iter().map(|&i| values[i]).sum();
        cl.center = sum / cl.members.len() as f64;
    }
    clusters
}

/// Right and left unit eigenvectors of `P` at `z` from the smallest singular
/// triple of `P(z)`.
pub fn eig_vectors(p: &MatrixPolynomial, z: Complex64) -> Result<EigenVectors> {
    let scale = p.norm_inf() * z.norm().max(1.0).powi(p.degree() as i32);
    eig_vectors_with_tol(p, z, EIGENVALUE_RESIDUAL_TOL * scale)
}

pub fn eig_vectors_with_tol(p: &MatrixPolynomial, z: Complex64, tol: f64) -> Result<EigenVectors> {
    let (u, s, v) = svd(&p.eval(z));
    let last = s.len() - 1;
    if s[last] > tol {
        return Err(PolyError::NotAnEigenvalue {
            z,
            s_min: s[last],
            tol,
        });
    }
    Ok(EigenVectors {
        x: v.column(last).clone_owned(),
        y: u.column(last).clone_owned(),
        s_min: s[last],
    })
}

/// Right and left eigenvectors of `C_P` induced by eigenvectors of `P`:
/// `chi = [x; z x; ...; z^{m-1} x]`, `psi = [E_1(z)* y; ...; E_m(z)* y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionEigenPair {
    pub chi: CVector,
    pub psi: CVector,
}

pub fn companion_vectors(p: &MatrixPolynomial, z: Complex64, x: &CVector, y: &CVector) -> CompanionEigenPair {
    let (n, m) = (p.n(), p.degree());
    let mut chi = CVector::zeros(n * m);
    let mut power = Complex64::new(1.0, 0.0);
    for blk in 0..m {
        chi.rows_mut(blk * n, n).copy_from(&(x * power));
        power *= z;
    }
    let mut psi = CVector::zeros(n * m);
    for (blk, e) in horner_blocks(p, z).iter().enumerate() {
        psi.rows_mut(blk * n, n).copy_from(&(e.adjoint() * y));
    }
    CompanionEigenPair { chi, psi }
}

/// One Jordan block of `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
}

/// A Jordan triple `(X, J, Y)` with `P(z)^{-1} = X (zI - J)^{-1} Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanTriple {
    x: CMatrix,
    j: CMatrix,
    y: CMatrix,
    blocks: Vec<JordanBlock>,
}

impl JordanTriple {
    /// Assembles `J` from block descriptors and checks shapes:
    /// `X` is `n x N`, `Y` is `N x n` with `N` the sum of the block sizes.
    pub fn new(x: CMatrix, blocks: Vec<JordanBlock>, y: CMatrix) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|b| b.size == 0) {
            return Err(PolyError::InvalidTriple("Jordan blocks must be nonempty".into()));
        }
        let total: usize = blocks.iter().map(|b| b.size).sum();
        if x.ncols() != total || y.nrows() != total || x.nrows() != y.ncols() {
            return Err(PolyError::InvalidTriple(format!(
                "X is {}x{}, Y is {}x{}, blocks total {total}",
                x.nrows(),
                x.ncols(),
                y.nrows(),
                y.ncols()
            )));
        }
        crate::poly::check_finite(&x, "X")?;
        crate::poly::check_finite(&y, "Y")?;
        let mut j = CMatrix::zeros(total, total);
        let mut offset = 0;
        for b in &blocks {
            for k in 0..b.size {
                j[(offset + k, offset + k)] = b.eigenvalue;
                if k + 1 < b.size {
                    j[(offset + k, offset + k + 1)] = Complex64::new(1.0, 0.0);
                }
            }
            offset += b.size;
        }
        Ok(Self { x, j, y, blocks })
    }

    /// Reads block structure off an explicit Jordan matrix. Each block must be
    /// upper bidiagonal with constant diagonal and unit superdiagonal.
    pub fn from_jordan_matrix(x: CMatrix, j: &CMatrix, y: CMatrix) -> Result<Self> {
        let total = j.nrows();
        if j.ncols() != total {
            return Err(PolyError::InvalidTriple("J must be square".into()));
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 0..total {
            let closes = i + 1 == total || j[(i, i + 1)] == zero;
            if !closes && (j[(i, i + 1)] != one || j[(i + 1, i + 1)] != j[(i, i)]) {
                return Err(PolyError::InvalidTriple(format!("J is not in Jordan form at row {i}")));
            }
            if closes {
                blocks.push(JordanBlock {
                    eigenvalue: j[(start, start)],
                    size: i + 1 - start,
                });
                start = i + 1;
            }
        }
        let triple = Self::new(x, blocks, y)?;
        if (&triple.j - j).iter().any(|c| *c != zero) {
            return Err(PolyError::InvalidTriple(
                "J has entries outside its Jordan blocks".into(),
            ));
        }
        Ok(triple)
    }

    pub fn x(&self) -> &CMatrix {
        &self.x
    }

    pub fn y(&self) -> &CMatrix {
        &self.y
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    /// Largest Jordan block size `p`.
    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(|b| b.size).max().unwrap_or(0)
    }

    /// `X (zI - J)^{-1} Y`.
    pub fn resolvent(&self, z: Complex64) -> Option<CMatrix> {
        let total = self.j.nrows();
        let shifted = CMatrix::identity(total, total) * z - &self.j;
        shifted.lu().solve(&self.y).map(|w| &self.x * w)
    }
}

/// Outcome of checking a Jordan triple against `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleCheck {
    /// `max ||P(z)^{-1} - X(zI-J)^{-1}Y|| / ||P(z)^{-1}||` over accepted samples.
    pub max_residual: f64,
    pub accepted: Vec<Complex64>,
    pub rejected: Vec<(Complex64, String)>,
}

/// Checks shapes, invertibility of `[X; XJ; ...; XJ^{m-1}]`, and the
/// resolvent identity at each sample point.
pub fn validate_jordan_triple(
    p: &MatrixPolynomial,
    t: &JordanTriple,
    samples: &[Complex64],
) -> Result<TripleCheck> {
    let (n, m, nm) = (p.n(), p.degree(), p.nm());
    if t.x.nrows() != n || t.x.ncols() != nm {
        return Err(PolyError::InvalidTriple(format!(
            "X is {}x{}, expected {n}x{nm}",
            t.x.nrows(),
            t.x.ncols()
        )));
    }
    let mut stacked = CMatrix::zeros(nm, nm);
    let mut xj = t.x.clone();
    for blk in 0..m {
        stacked.view_mut((blk * n, 0), (n, nm)).copy_from(&xj);
        xj = &xj * &t.j;
    }
    let sv = singular_values(&stacked);
    if !(sv[nm - 1] > 1e-12 * sv[0]) {
        return Err(PolyError::InvalidTriple(format!(
            "[X; XJ; ...] is singular (s_min/s_max = {:e})",
            sv[nm - 1] / sv[0]
        )));
    }

    let mut check = TripleCheck {
        max_residual: 0.0,
        accepted: Vec::new(),
        rejected: Vec::new(),
    };
    for &z in samples {
        let pz = p.eval(z);
        let psv = singular_values(&pz);
        if !(psv[n - 1] > 1e-8 * psv[0]) {
            check
                .rejected
                .push((z, format!("too close to the spectrum: s_min(P(z)) = {:e}", psv[n - 1])));
            continue;
        }
        let inv = pz.lu().try_inverse().expect("nonsingular by the s_min check");
        let Some(res) = t.resolvent(z) else {
            check.rejected.push((z, "z is an eigenvalue of J".into()));
            continue;
        };
        let r = spectral_norm(&(&inv - res)) / spectral_norm(&inv);
        check.max_residual = check.max_residual.max(r);
        check.accepted.push(z);
    }
    if check.accepted.is_empty() {
        return Err(PolyError::InvalidInput(
            "every sample point was rejected as too close to the spectrum".into(),
        ));
    }
    Ok(check)
}

/// `k(P) = ||X|| ||Y||`. Depends on the choice of triple.
pub fn eigenproblem_cond(t: &JordanTriple) -> f64 {
    spectral_norm(&t.x) * spectral_norm(&t.y)
}
