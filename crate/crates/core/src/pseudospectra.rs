//! Weighted pseudospectra `sigma_eps(P) = { z : s_min(P(z)) <= eps w(|z|) }`
//! sampled on a rectangular grid, with marching-squares level sets.

use std::collections::VecDeque;
use std::hash::{DefaultHasher, Hash, Hasher};

use rayon::prelude::*;

use crate::error::{PolyError, Result};
use crate::poly::{s_min, MatrixPolynomial, WeightSet};
use crate::Complex64;

/// `eps w_m < s_min(A_m)`, which makes `sigma_eps(P)` bounded.
pub fn boundedness_check(p: &MatrixPolynomial, w: &WeightSet, eps: f64) -> bool {
    eps * w.get(w.degree()) < s_min(p.leading())
}

/// `s_min(P(z)) / w(|z|)`.
pub fn pseudo_value(p: &MatrixPolynomial, w: &WeightSet, z: Complex64) -> f64 {
    s_min(&p.eval(z)) / w.eval(z.norm(), 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl GridBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let b = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) && re_min < re_max && im_min < im_max {
            Ok(b)
        } else {
            Err(PolyError::InvalidInput(format!(
                "empty or non-finite box [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )))
        }
    }

    /// Square box of half-width `r` around `c`.
    pub fn around(c: Complex64, r: f64) -> Result<Self> {
        Self::new(c.re - r, c.re + r, c.im - r, c.im + r)
    }
}

/// Values of `g` at the nodes of a grid, stored row-major with the real
/// part varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoGrid {
    pub bbox: GridBox,
    pub nx: usize,
    pub ny: usize,
    values: Vec<f64>,
    /// Hash of the coefficient bits; `None` for synthetic grids.
    pub fingerprint: Option<u64>,
    pub weights: Option<Vec<f64>>,
}

fn coord(lo: f64, hi: f64, i: usize, count: usize) -> f64 {
    if count == 1 {
        lo
    } else {
        lo + (hi - lo) * (i as f64 / (count - 1) as f64)
    }
}

impl PseudoGrid {
    /// Samples `f` at every node; nodes are evaluated in parallel.
    pub fn from_fn<F>(bbox: GridBox, nx: usize, ny: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        if nx == 0 || ny == 0 {
            return Err(PolyError::InvalidInput(format!("resolution {nx}x{ny} must be positive")));
        }
        let values = (0..nx * ny)
            .into_par_iter()
            .map(|k| {
                let (ix, iy) = (k % nx, k / nx);
                f(Complex64::new(
                    coord(bbox.re_min, bbox.re_max, ix, nx),
                    coord(bbox.im_min, bbox.im_max, iy, ny),
                ))
            })
            .collect();
        Ok(Self {
            bbox,
            nx,
            ny,
            values,
            fingerprint: None,
            weights: None,
        })
    }

    pub fn node(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            coord(self.bbox.re_min, self.bbox.re_max, ix, self.nx),
            coord(self.bbox.im_min, self.bbox.im_max, iy, self.ny),
        )
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Node index `(ix, iy)` of the smallest value.
    pub fn argmin(&self) -> (usize, usize) {
        let k = self
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        (k % self.nx, k / self.nx)
    }

    /// Nodes with `g <= eps`.
    pub fn sublevel_mask(&self, eps: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v <= eps).collect()
    }

    /// 4-connected components of [`Self::sublevel_mask`].
    pub fn sublevel_components(&self, eps: f64) -> usize {
        let mask = self.sublevel_mask(eps);
        let mut seen = vec![false; mask.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..mask.len() {
            if !mask[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                let (ix, iy) = (k % self.nx, k / self.nx);
                let mut push = |j: usize| {
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                };
                if ix > 0 {
                    push(k - 1);
                }
                if ix + 1 < self.nx {
                    push(k + 1);
                }
                if iy > 0 {
                    push(k - self.nx);
                }
                if iy + 1 < self.ny {
                    push(k + self.nx);
                }
            }
        }
        count
    }
}

fn fingerprint(p: &MatrixPolynomial) -> u64 {
    let mut h = DefaultHasher::new();
    p.n().hash(&mut h);
    for a in p.coeffs() {
        for z in a.iter() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

/// `g(z) = s_min(P(z)) / w(|z|)` on an `nx x ny` grid over `bbox`.
pub fn grid_eval(p: &MatrixPolynomial, w: &WeightSet, bbox: GridBox, nx: usize, ny: usize) -> Result<PseudoGrid> {
    w.check_matches(p)?;
    let mut g = PseudoGrid::from_fn(bbox, nx, ny, |z| pseudo_value(p, w, z))?;
    g.fingerprint = Some(fingerprint(p));
    g.weights = Some(w.as_slice().to_vec());
    Ok(g)
}

/// A piece of the level set inside one grid cell. `edges` identify the
/// grid edges the endpoints lie on, so neighbouring segments share them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Complex64,
    pub b: Complex64,
    pub edges: [usize; 2],
    pub component: usize,
}

/// The level set `g = eps` as segments grouped into connected components.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    pub level: f64,
    pub segments: Vec<Segment>,
    pub components: usize,
    /// Why the set is empty, if it is.
    pub diagnostic: Option<String>,
}

impl ContourSet {
    /// Distinct vertices of component `c`.
    pub fn component_vertices(&self, c: usize) -> Vec<Complex64> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for s in self.segments.iter().filter(|s| s.component == c) {
            for (e, v) in s.edges.iter().zip([s.a, s.b]) {
                if seen.insert(*e) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Whether `z` is enclosed by component `c` (even-odd rule on a
    /// rightward ray).
    pub fn encloses(&self, c: usize, z: Complex64) -> bool {
        let mut inside = false;
        for s in self.segments.iter().filter(|s| s.component == c) {
            let (a, b) = (s.a, s.b);
            if (a.im > z.im) != (b.im > z.im) {
                let t = (z.im - a.im) / (b.im - a.im);
                if a.re + t * (b.re - a.re) > z.re {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// The innermost component enclosing `z`, measured by median vertex
    /// distance to `z`.
    pub fn component_containing(&self, z: Complex64) -> Option<usize> {
        (0..self.components)
            .filter(|&c| self.encloses(c, z))
            .map(|c| (c, median_distance(&self.component_vertices(c), z)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(c, _)| c)
    }

    /// Median of `|v - center|` over the vertices of the component
    /// enclosing `center`.
    pub fn fit_radius(&self, center: Complex64) -> Result<f64> {
        let c = self.require_component(center)?;
        Ok(median_distance(&self.component_vertices(c), center))
    }

    fn require_component(&self, center: Complex64) -> Result<usize> {
        self.component_containing(center).ok_or_else(|| {
            PolyError::NoComponent(format!(
                "no component of the level set {:e} encloses {center}",
                self.level
            ))
        })
    }
}

fn median_distance(vs: &[Complex64], z: Complex64) -> f64 {
    let mut d: Vec<f64> = vs.iter().map(|v| (v - z).norm()).collect();
    if d.is_empty() {
        return f64::NAN;
    }
    d.sort_by(f64::total_cmp);
    let h = d.len() / 2;
    if d.len() % 2 == 1 {
        d[h]
    } else {
        0.5 * (d[h - 1] + d[h])
    }
}

/// `max ||v - center| - radius| / radius` over the vertices of the component
/// enclosing `center`.
pub fn disc_deviation(contour: &ContourSet, center: Complex64, radius: f64) -> Result<f64> {
    let c = contour.require_component(center)?;
    Ok(contour
        .component_vertices(c)
        .iter()
        .map(|v| ((v - center).norm() - radius).abs() / radius)
        .fold(0.0, f64::max))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Marching squares for `g = eps` with linear interpolation along cell
/// edges. Ambiguous cells are split according to the mean of their four
/// corner values.
pub fn contours(grid: &PseudoGrid, eps: f64) -> ContourSet {
    let empty = |msg: String| ContourSet {
        level: eps,
        segments: Vec::new(),
        components: 0,
        diagnostic: Some(msg),
    };
    let (lo, hi) = (grid.min(), grid.max());
    if !(eps > 0.0) {
        return empty(format!("level {eps:e} must be positive"));
    }
    if eps < lo || eps > hi {
        return empty(format!("level {eps:e} outside the grid range [{lo:e}, {hi:e}]"));
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let h_id = |ix: usize, iy: usize| iy * (nx - 1) + ix;
    let v_base = (nx - 1) * ny;
    let v_id = |ix: usize, iy: usize| v_base + iy * nx + ix;
    let crossing = |p: (usize, usize), q: (usize, usize)| {
        let (va, vb) = (grid.value(p.0, p.1), grid.value(q.0, q.1));
        let t = ((eps - va) / (vb - va)).clamp(0.0, 1.0);
        let (za, zb) = (grid.node(p.0, p.1), grid.node(q.0, q.1));
        za + (zb - za) * t
    };

    let mut raw: Vec<(Complex64, Complex64, [usize; 2])> = Vec::new();
    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            let vals = corners.map(|(a, b)| grid.value(a, b));
            let inside = vals.map(|v| v <= eps);
            // Edge k joins corners k and k+1: bottom, right, top, left.
            let ids = [h_id(ix, iy), v_id(ix + 1, iy), h_id(ix, iy + 1), v_id(ix, iy)];
            let cut: Vec<usize> = (0..4).filter(|&k| inside[k] != inside[(k + 1) % 4]).collect();
            let point = |k: usize| crossing(corners[k], corners[(k + 1) % 4]);
            match cut.len() {
                2 => raw.push((point(cut[0]), point(cut[1]), [ids[cut[0]], ids[cut[1]]])),
                4 => {
                    let center_inside = vals.iter().sum::<f64>() / 4.0 <= eps;
                    // Cut off the two corners on the other side of the center.
                    for k in (0..4).filter(|&k| inside[k] != center_inside) {
                        let before = (k + 3) % 4;
                        raw.push((point(before), point(k), [ids[before], ids[k]]));
                    }
                }
                _ => {}
            }
        }
    }

    let total = v_base + nx * ny;
    let mut uf = UnionFind((0..total).collect());
    for (_, _, e) in &raw {
        uf.union(e[0], e[1]);
    }
    let mut label = std::collections::HashMap::new();
    let segments = raw
        .into_iter()
        .map(|(a, b, edges)| {
            let root = uf.find(edges[0]);
            let next = label.len();
            let component = *label.entry(root).or_insert(next);
            Segment { a, b, edges, component }
        })
        .collect();
    ContourSet {
        level: eps,
        segments,
        components: label.len(),
        diagnostic: None,
    }
}
