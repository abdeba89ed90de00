//! TOML problem files.
//!
//! ```toml
//! n = 2
//! m = 1
//! # A_0, ..., A_m; an entry is a real number or an [re, im] pair
//! coeffs = [
//!   [[1, 0], [0, [0, 2]]],
//!   [[1, 0], [0, 1]],
//! ]
//! weights = [1, 1]        # optional, defaults to w_j = ||A_j||
//!
//! [triple]                # optional Jordan triple
//! x = [...]               # n x nm
//! y = [...]               # nm x n
//! blocks = [{ eigenvalue = 1, size = 2 }, ...]
//!
//! [multiple]              # optional data for a multiple eigenvalue
//! eigenvalue = 1
//! xhat = [...]            # n x k
//! yhat = [...]            # k x n
//! p0 = 2
//!
//! [perturbed]             # optional perturbed polynomial of the same shape
//! coeffs = [...]
//! ```

use std::fmt;
use std::ops::Range;

use polycond::fixtures::{Fixture, MultipleEigenData};
use polycond::spectra::{JordanBlock, JordanTriple};
use polycond::{CMatrix, Complex64, MatrixPolynomial, WeightSet};
use serde::{Deserialize, Serialize};
use toml::Spanned;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(r) => Complex64::new(r, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    fn from_value(z: Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

type Rows = Vec<Vec<Entry>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    n: usize,
    m: usize,
    coeffs: Spanned<Vec<Spanned<Rows>>>,
    weights: Option<Spanned<Vec<f64>>>,
    triple: Option<Spanned<RawTriple>>,
    multiple: Option<Spanned<RawMultiple>>,
    perturbed: Option<Spanned<RawPerturbed>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriple {
    x: Spanned<Rows>,
    y: Spanned<Rows>,
    blocks: Vec<RawBlock>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    eigenvalue: Entry,
    size: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMultiple {
    eigenvalue: Entry,
    xhat: Spanned<Rows>,
    yhat: Spanned<Rows>,
    p0: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbed {
    coeffs: Vec<Spanned<Rows>>,
}

/// A problem-file error with the offending field and, when known, its line.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ProblemError {}

/// A validated problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub poly: MatrixPolynomial,
    pub weights: WeightSet,
    /// Whether the file listed weights explicitly.
    pub explicit_weights: bool,
    /// Set when default weights had to floor `w_0` because `A_0 = 0`.
    pub weight_floored: bool,
    pub triple: Option<JordanTriple>,
    pub multiple: Option<MultipleEigenData>,
    pub perturbed: Option<MatrixPolynomial>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err(&self, field: impl Into<String>, span: Option<&Range<usize>>, message: impl fmt::Display) -> ProblemError {
        ProblemError {
            field: field.into(),
            line: span.map(|s| self.line(s)),
            message: message.to_string(),
        }
    }

    fn matrix(&self, field: &str, raw: &Spanned<Rows>, rows: usize, cols: usize) -> Result<CMatrix, ProblemError> {
        let span = raw.span();
        let data = raw.get_ref();
        if data.len() != rows {
            return Err(self.err(field, Some(&span), format!("expected {rows} rows, found {}", data.len())));
        }
        if let Some((i, r)) = data.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(self.err(
                format!("{field}[{i}]"),
                Some(&span),
                format!("expected {cols} entries, found {}", r.len()),
            ));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| data[i][j].value()))
    }

    fn coeffs(&self, field: &str, raw: &[Spanned<Rows>], n: usize, m: usize) -> Result<Vec<CMatrix>, ProblemError> {
        if raw.len() != m + 1 {
            return Err(self.err(field, None, format!("expected m + 1 = {} matrices, found {}", m + 1, raw.len())));
        }
        raw.iter()
            .enumerate()
            .map(|(j, a)| self.matrix(&format!("{field}[{j}]"), a, n, n))
            .collect()
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let cx = Ctx { text };
    let raw: RawProblem = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| cx.line(&s));
        ProblemError {
            field: "document".into(),
            line,
            message: e.message().to_string(),
        }
    })?;
    let (n, m) = (raw.n, raw.m);
    if n == 0 {
        return Err(cx.err("n", None, "must be at least 1"));
    }
    if m == 0 {
        return Err(cx.err("m", None, "must be at least 1"));
    }
    let coeff_span = raw.coeffs.span();
    let coeffs = cx.coeffs("coeffs", raw.coeffs.get_ref(), n, m)?;
    let poly = MatrixPolynomial::new(coeffs).map_err(|e| cx.err("coeffs", Some(&coeff_span), e))?;

    let (weights, explicit_weights, weight_floored) = match &raw.weights {
        Some(w) => {
            let span = w.span();
            if w.get_ref().len() != m + 1 {
                return Err(cx.err(
                    "weights",
                    Some(&span),
                    format!("expected m + 1 = {} weights, found {}", m + 1, w.get_ref().len()),
                ));
            }
            let ws = WeightSet::new(w.get_ref().clone()).map_err(|e| cx.err("weights", Some(&span), e))?;
            (ws, true, false)
        }
        None => {
            let (ws, floored) = WeightSet::from_norms(&poly);
            (ws, false, floored)
        }
    };

    let nm = n * m;
    let triple = match &raw.triple {
        Some(t) => {
            let span = t.span();
            let t = t.get_ref();
            let x = cx.matrix("triple.x", &t.x, n, nm)?;
            let y = cx.matrix("triple.y", &t.y, nm, n)?;
            let blocks = t
                .blocks
                .iter()
                .map(|b| JordanBlock {
                    eigenvalue: b.eigenvalue.value(),
                    size: b.size,
                })
                .collect();
            Some(JordanTriple::new(x, blocks, y).map_err(|e| cx.err("triple", Some(&span), e))?)
        }
        None => None,
    };

    let multiple = match &raw.multiple {
        Some(d) => {
            let span = d.span();
            let d = d.get_ref();
            let kappa = d.xhat.get_ref().first().map_or(0, Vec::len);
            if kappa == 0 || kappa > n {
                return Err(cx.err("multiple.xhat", Some(&span), format!("expected {n} x k with 1 <= k <= {n}")));
            }
            if d.p0 == 0 {
                return Err(cx.err("multiple.p0", Some(&span), "must be at least 1"));
            }
            Some(MultipleEigenData {
                eigenvalue: d.eigenvalue.value(),
                xhat: cx.matrix("multiple.xhat", &d.xhat, n, kappa)?,
                yhat: cx.matrix("multiple.yhat", &d.yhat, kappa, n)?,
                p0: d.p0,
            })
        }
        None => None,
    };

    let perturbed = match &raw.perturbed {
        Some(q) => {
            let span = q.span();
            let coeffs = cx.coeffs("perturbed.coeffs", &q.get_ref().coeffs, n, m)?;
            Some(MatrixPolynomial::new(coeffs).map_err(|e| cx.err("perturbed.coeffs", Some(&span), e))?)
        }
        None => None,
    };

    Ok(ProblemFile {
        poly,
        weights,
        explicit_weights,
        weight_floored,
        triple,
        multiple,
        perturbed,
    })
}

fn inline<T: Serialize + ?Sized>(v: &T) -> String {
    toml::Value::try_from(v).expect("plain data serializes").to_string()
}

fn entry(z: Complex64) -> String {
    let e = inline(&[Entry::from_value(z)]);
    e[1..e.len() - 1].to_string()
}

fn row(a: &CMatrix, i: usize) -> String {
    let r: Vec<Entry> = (0..a.ncols()).map(|j| Entry::from_value(a[(i, j)])).collect();
    inline(&r)
}

fn write_matrix(out: &mut String, key: &str, a: &CMatrix) {
    out.push_str(&format!("{key} = [\n"));
    for i in 0..a.nrows() {
        out.push_str(&format!("    {},\n", row(a, i)));
    }
    out.push_str("]\n");
}

fn write_coeffs(out: &mut String, coeffs: &[CMatrix]) {
    out.push_str("coeffs = [\n");
    for a in coeffs {
        out.push_str("    [\n");
        for i in 0..a.nrows() {
            out.push_str(&format!("        {},\n", row(a, i)));
        }
        out.push_str("    ],\n");
    }
    out.push_str("]\n");
}

/// Writes a problem file, one matrix row per line. Floats are written in
/// shortest round-trip form, so `parse_problem` recovers `p` exactly.
pub fn serialize_problem(p: &ProblemFile) -> String {
    let mut out = format!("n = {}\nm = {}\n", p.poly.n(), p.poly.degree());
    write_coeffs(&mut out, p.poly.coeffs());
    if p.explicit_weights {
        out.push_str(&format!("weights = {}\n", inline(p.weights.as_slice())));
    }
    if let Some(t) = &p.triple {
        out.push_str("\n[triple]\n");
        write_matrix(&mut out, "x", t.x());
        write_matrix(&mut out, "y", t.y());
        out.push_str("blocks = [\n");
        for b in t.blocks() {
            out.push_str(&format!(
                "    {{ eigenvalue = {}, size = {} }},\n",
                entry(b.eigenvalue),
                b.size
            ));
        }
        out.push_str("]\n");
    }
    if let Some(d) = &p.multiple {
        out.push_str("\n[multiple]\n");
        out.push_str(&format!("eigenvalue = {}\n", entry(d.eigenvalue)));
        write_matrix(&mut out, "xhat", &d.xhat);
        write_matrix(&mut out, "yhat", &d.yhat);
        out.push_str(&format!("p0 = {}\n", d.p0));
    }
    if let Some(q) = &p.perturbed {
        out.push_str("\n[perturbed]\n");
        write_coeffs(&mut out, q.coeffs());
    }
    out
}

/// A built-in reference problem as a problem file. Weights are written out
/// unless they coincide with the norm defaults.
pub fn from_fixture(f: &Fixture) -> ProblemFile {
    let (defaults, floored) = WeightSet::from_norms(&f.poly);
    let explicit = defaults != f.weights;
    ProblemFile {
        poly: f.poly.clone(),
        weights: f.weights.clone(),
        explicit_weights: explicit,
        weight_floored: !explicit && floored,
        triple: f.triple.clone(),
        multiple: f.multiple.clone(),
        perturbed: f.perturbed.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polycond::fixtures;

    #[test]
    fn minimal_scalar_problem() {
        let p = parse_problem("n = 1\nm = 1\ncoeffs = [[[-2]], [[1]]]\n").unwrap();
        assert_eq!(p.poly.eval(Complex64::new(2.0, 0.0))[(0, 0)], Complex64::new(0.0, 0.0));
        assert!(!p.explicit_weights);
        assert_eq!(p.weights.as_slice(), &[2.0, 1.0]);
    }

    #[test]
    fn complex_entries_and_integers() {
        let p = parse_problem("n = 2\nm = 1\ncoeffs = [[[1, [0, 2]], [0, 1.5]], [[1, 0], [0, 1]]]\n").unwrap();
        assert_eq!(p.poly.coeff(0)[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(p.poly.coeff(0)[(1, 1)], Complex64::new(1.5, 0.0));
    }

    #[test]
    fn fixtures_round_trip() {
        for f in fixtures::all() {
            let p = from_fixture(&f);
            let text = serialize_problem(&p);
            let back = parse_problem(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", f.name));
            assert_eq!(back, p, "{}", f.name);
            assert_eq!(serialize_problem(&back), text);
        }
    }

    #[test]
    fn zero_weight_floor_is_flagged() {
        let p = parse_problem("n = 1\nm = 1\ncoeffs = [[[0]], [[1]]]\n").unwrap();
        assert!(p.weight_floored);
        assert!(p.weights.get(0) > 0.0);
    }

    #[test]
    fn singular_leading_coefficient_is_rejected() {
        let e = parse_problem("n = 2\nm = 1\ncoeffs = [[[1, 0], [0, 1]], [[0, 0], [0, 0]]]\n").unwrap_err();
        assert_eq!(e.field, "coeffs");
        assert!(e.message.contains("singular"), "{e}");
    }

    #[test]
    fn errors_carry_field_and_line() {
        let text = "n = 2\nm = 1\ncoeffs = [\n  [[1, 0], [0, 1]],\n  [[1, 0], [0]],\n]\n";
        let e = parse_problem(text).unwrap_err();
        assert_eq!(e.field, "coeffs[1][1]");
        assert_eq!(e.line, Some(5));

        let e = parse_problem("n = 1\nm = 2\ncoeffs = [[[1]], [[1]]]\n").unwrap_err();
        assert_eq!(e.field, "coeffs");
        assert!(e.message.contains("m + 1 = 3"));

        let e = parse_problem("n = 1\nm = 1\ncoeffs = [[[1]], [[1]]]\nweights = [1]\n").unwrap_err();
        assert_eq!((e.field.as_str(), e.line), ("weights", Some(4)));

        let e = parse_problem("n = 1\nm = 1\ncoeffs = [[[1]], [[\"a\"]]]\n").unwrap_err();
        assert_eq!((e.field.as_str(), e.line), ("document", Some(3)));

        let e = parse_problem("n = 1\nm = 1\ncoefs = []\n").unwrap_err();
        assert_eq!(e.field, "document");
    }
}
