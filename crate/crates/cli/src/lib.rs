//! Command-line front end: problem files in, JSON documents out.

pub mod problem;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use polycond::bounds::{bauer_fike_bound, bound_comparator, dist_mult_bound, dist_mult_bound_adj, elsner_bound, BoundFlag, BoundReport};
use polycond::condition::{adjugate_quotient, cond_multiple, cond_simple, cond_via_companion};
use polycond::linearization::linearization_residual;
use polycond::perturb::{defect_perturbation, random_perturbation_at, Admissibility, PerturbedPolynomial};
use polycond::poly::{matrix_condition, spectral_norm};
use polycond::pseudospectra::{boundedness_check, contours, grid_eval, ContourSet, GridBox, PseudoGrid};
use polycond::spectra::{eigenproblem_cond, eigenvalues, validate_jordan_triple, Spectrum};
use polycond::{CMatrix, Complex64, PolyError, WeightSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub use problem::{from_fixture, parse_problem, serialize_problem, ProblemError, ProblemFile};

#[derive(Debug, Parser, Serialize)]
#[command(name = "polycond", version, about = "Eigenvalue conditioning and perturbation analysis for matrix polynomials")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Eigenvalue clustering tolerance (default: scaled to the spectrum).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Override the file's weights: `norms`, `ones`, or a list such as `0.1,1,1,0`.
    #[arg(long, global = true)]
    pub weights: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Eigenvalues, clusters and eigenvectors of simple eigenvalues.
    Eig(FileArg),
    /// Condition number of a simple eigenvalue by every route.
    Cond(EigArgs),
    /// Condition number of the multiple eigenvalue in the file's [multiple] table.
    MultiCond {
        #[command(flatten)]
        #[serde(flatten)]
        file: FileArg,
        /// Also report the predicted pseudospectral radius at these levels.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        eps: Vec<f64>,
    },
    /// Upper bound on the distance to a polynomial with a multiple eigenvalue.
    Dist(EigArgs),
    /// Eigenvalue inclusion bounds for perturbations of size eps.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Weighted pseudospectrum on a grid, with level-set contours.
    Pseudo(PseudoArgs),
    /// Constructed or random perturbations of the problem.
    #[command(subcommand)]
    Perturb(PerturbCommand),
    /// Numerical checks of the linearization and of a Jordan triple.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct FileArg {
    /// Problem file (TOML).
    pub file: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EigArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub file: FileArg,
    /// Eigenvalue as `RE [IM]`; snapped to the nearest computed eigenvalue.
    #[arg(long, num_args = 1..=2, allow_negative_numbers = true, required = true)]
    pub eig: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub file: FileArg,
    #[arg(long)]
    pub eps: f64,
    /// Eigenvalue of the perturbed problem as `RE [IM]`.
    #[arg(long, num_args = 1..=2, allow_negative_numbers = true, required = true)]
    pub mu: Vec<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsCommand {
    Elsner(BoundArgs),
    BauerFike(BoundArgs),
    Compare(BoundArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PseudoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub file: FileArg,
    #[arg(long)]
    pub eps: f64,
    /// `RE_MIN RE_MAX IM_MIN IM_MAX`
    #[arg(long = "box", num_args = 4, allow_negative_numbers = true, required = true)]
    pub bbox: Vec<f64>,
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 201)]
    pub ny: usize,
    /// Write the grid CSV here instead of embedding it in the result.
    #[arg(long)]
    pub grid_csv: Option<PathBuf>,
    /// Write the contour CSV here instead of embedding it in the result.
    #[arg(long)]
    pub contour_csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbCommand {
    /// Perturbation that makes a simple eigenvalue multiple.
    Defect(EigArgs),
    /// Random perturbation on the boundary of the weighted ball.
    Random {
        #[command(flatten)]
        #[serde(flatten)]
        file: FileArg,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Companion linearization identity at sample points.
    Linearization {
        #[command(flatten)]
        #[serde(flatten)]
        file: FileArg,
        /// Number of seeded random points in the square of half-width `radius`.
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        /// Explicit sample points `RE IM`, repeatable; replaces random points.
        #[arg(long, num_args = 2, allow_negative_numbers = true, action = clap::ArgAction::Append)]
        at: Vec<f64>,
    },
    /// Resolvent identity of the file's Jordan triple.
    Triple {
        #[command(flatten)]
        #[serde(flatten)]
        file: FileArg,
        /// Sample points `RE IM`, repeatable.
        #[arg(long, num_args = 2, allow_negative_numbers = true, action = clap::ArgAction::Append)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Problem(ProblemError),
    Io(String),
    Analysis(PolyError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(_) => 1,
            _ => 2,
        }
    }

    pub fn document(&self) -> Value {
        let (kind, extra) = match self {
            CliError::Usage(_) => ("usage", Value::Null),
            CliError::Problem(e) => ("problem_file", json!({ "field": e.field, "line": e.line })),
            CliError::Io(_) => ("io", Value::Null),
            CliError::Analysis(_) => ("analysis", Value::Null),
        };
        let mut err = json!({ "kind": kind, "message": self.to_string() });
        if let Value::Object(m) = extra {
            err.as_object_mut().unwrap().extend(m);
        }
        json!({ "error": err })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Problem(e) => e.fmt(f),
            CliError::Analysis(e) => e.fmt(f),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Analysis(e)
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn cz(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cvec<'a>(v: impl IntoIterator<Item = &'a Complex64>) -> Value {
    Value::Array(v.into_iter().map(|z| cz(*z)).collect())
}

fn mat(a: &CMatrix) -> Value {
    Value::Array((0..a.nrows()).map(|i| cvec(a.row(i).iter())).collect())
}

fn flag_name(f: BoundFlag) -> &'static str {
    match f {
        BoundFlag::HypothesisUnverified => "hypothesis_unverified",
        BoundFlag::ThetaAtLeastOne => "theta_at_least_one",
        BoundFlag::ThetaBelowOne => "theta_below_one",
    }
}

fn report(b: &BoundReport) -> Value {
    let ingredients: Map<String, Value> = b.ingredients.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "value": b.value,
        "ingredients": ingredients,
        "flags": b.flags.iter().map(|f| flag_name(*f)).collect::<Vec<_>>(),
    })
}

fn admissibility(a: &Admissibility) -> Value {
    json!({
        "admissible": a.admissible,
        "delta_norms": a.delta_norms,
        "slack": a.slack,
        "tight": a.tight(1e-12),
    })
}

fn perturbed_doc(q: &PerturbedPolynomial) -> Res<Value> {
    let materialized = q.materialize()?;
    let ev = eigenvalues(&materialized)?;
    Ok(json!({
        "eps_used": q.eps_used(),
        "deltas": q.deltas().iter().map(mat).collect::<Vec<_>>(),
        "coeffs": materialized.coeffs().iter().map(mat).collect::<Vec<_>>(),
        "eigenvalues": cvec(&ev),
        "admissibility": admissibility(&q.admissibility(q.eps_used())),
    }))
}

fn complex_arg(name: &str, v: &[f64]) -> Res<Complex64> {
    match v {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(CliError::Usage(format!("--{name} takes RE or RE IM"))),
    }
}

fn points_arg(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn parse_weights(spec: &str, problem: &ProblemFile) -> Res<(WeightSet, &'static str, bool)> {
    let m = problem.poly.degree();
    match spec {
        "norms" => {
            let (w, floored) = WeightSet::from_norms(&problem.poly);
            Ok((w, "norms", floored))
        }
        "ones" => Ok((WeightSet::ones(m), "ones", false)),
        list => {
            let values = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(format!("--weights: {e}")))?;
            if values.len() != m + 1 {
                return Err(CliError::Usage(format!("--weights: expected {} values, found {}", m + 1, values.len())));
            }
            let w = WeightSet::new(values).map_err(|e| CliError::Usage(format!("--weights: {e}")))?;
            Ok((w, "flag", false))
        }
    }
}

/// A loaded problem with the weights in effect and the input digest.
pub struct Loaded {
    pub problem: ProblemFile,
    pub weights: WeightSet,
    pub weight_source: &'static str,
    pub weight_floored: bool,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn load(path: &Path, weights: Option<&str>) -> Res<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let problem = parse_problem(&text).map_err(CliError::Problem)?;
    let (weights, weight_source, weight_floored) = match weights {
        Some(spec) => parse_weights(spec, &problem)?,
        None if problem.explicit_weights => (problem.weights.clone(), "file", false),
        None => (problem.weights.clone(), "norms", problem.weight_floored),
    };
    Ok(Loaded {
        problem,
        weights,
        weight_source,
        weight_floored,
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

struct Session<'a> {
    cli: &'a Cli,
    loaded: Loaded,
}

impl Session<'_> {
    fn spectrum(&self) -> Res<Spectrum> {
        let p = &self.loaded.problem.poly;
        Ok(match self.cli.tol {
            Some(t) => Spectrum::with_tolerance(p, t)?,
            None => Spectrum::new(p)?,
        })
    }

    /// Nearest computed eigenvalue to `z`, within `1e-3 max(1, |z|)` or the
    /// clustering tolerance, whichever is larger.
    fn snap(&self, spec: &Spectrum, z: Complex64) -> Res<(usize, Value)> {
        let i = spec.nearest(z);
        let l = spec.eigenvalues()[i];
        let d = (l - z).norm();
        let allowed = (1e-3 * z.norm().max(1.0)).max(spec.tolerance());
        if d > allowed {
            return Err(CliError::Analysis(PolyError::InvalidInput(format!(
                "no eigenvalue within {allowed:e} of {z}; nearest is {l} at distance {d:e}"
            ))));
        }
        Ok((i, json!({ "requested": cz(z), "eigenvalue": cz(l), "index": i, "snap_distance": d })))
    }

    fn simple(&self, spec: &Spectrum, i: usize) -> Res<(Complex64, polycond::spectra::EigenVectors)> {
        spec.require_simple(i)?;
        let v = spec.vectors(i).cloned().ok_or_else(|| {
            CliError::Analysis(PolyError::NotSimple(spec.eigenvalues()[i], "no eigenvectors".into()))
        })?;
        Ok((spec.eigenvalues()[i], v))
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(am), Value::Object(bm)) = (&mut a, b) {
        am.extend(bm);
    }
    a
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eig(_) => "eig",
        Command::Cond(_) => "cond",
        Command::MultiCond { .. } => "multi-cond",
        Command::Dist(_) => "dist",
        Command::Bounds(BoundsCommand::Elsner(_)) => "bounds elsner",
        Command::Bounds(BoundsCommand::BauerFike(_)) => "bounds bauer-fike",
        Command::Bounds(BoundsCommand::Compare(_)) => "bounds compare",
        Command::Pseudo(_) => "pseudo",
        Command::Perturb(PerturbCommand::Defect(_)) => "perturb defect",
        Command::Perturb(PerturbCommand::Random { .. }) => "perturb random",
        Command::Verify(VerifyCommand::Linearization { .. }) => "verify linearization",
        Command::Verify(VerifyCommand::Triple { .. }) => "verify triple",
    }
}

fn file_of(c: &Command) -> &Path {
    match c {
        Command::Eig(f) | Command::MultiCond { file: f, .. } => &f.file,
        Command::Cond(a) | Command::Dist(a) | Command::Perturb(PerturbCommand::Defect(a)) => &a.file.file,
        Command::Bounds(BoundsCommand::Elsner(a) | BoundsCommand::BauerFike(a) | BoundsCommand::Compare(a)) => {
            &a.file.file
        }
        Command::Pseudo(a) => &a.file.file,
        Command::Perturb(PerturbCommand::Random { file, .. })
        | Command::Verify(VerifyCommand::Linearization { file, .. } | VerifyCommand::Triple { file, .. }) => &file.file,
    }
}

/// Runs one command and returns its result document.
pub fn run(cli: &Cli) -> Res<Value> {
    let loaded = load(file_of(&cli.command), cli.weights.as_deref())?;
    let header = json!({
        "command": command_name(&cli.command),
        "input": { "path": loaded.path.display().to_string(), "sha256": loaded.sha256 },
        "params": serde_json::to_value(cli).expect("arguments serialize"),
        "weights": {
            "values": loaded.weights.as_slice(),
            "source": loaded.weight_source,
            "floored": loaded.weight_floored,
        },
    });
    let s = Session { cli, loaded };
    let result = match &cli.command {
        Command::Eig(_) => eig(&s)?,
        Command::Cond(a) => cond(&s, a)?,
        Command::MultiCond { eps, .. } => multi_cond(&s, eps)?,
        Command::Dist(a) => dist(&s, a)?,
        Command::Bounds(b) => bounds(&s, b)?,
        Command::Pseudo(a) => pseudo(&s, a)?,
        Command::Perturb(PerturbCommand::Defect(a)) => defect(&s, a)?,
        Command::Perturb(PerturbCommand::Random { eps, stream, .. }) => random(&s, *eps, *stream)?,
        Command::Verify(VerifyCommand::Linearization { points, radius, at, .. }) => {
            verify_linearization(&s, *points, *radius, at)?
        }
        Command::Verify(VerifyCommand::Triple { at, threshold, .. }) => verify_triple(&s, at, *threshold)?,
    };
    Ok(merge(header, json!({ "result": result })))
}

fn eig(s: &Session) -> Res<Value> {
    let spec = s.spectrum()?;
    let clusters: Vec<Value> = spec
        .clusters()
        .iter()
        .map(|c| json!({ "center": cz(c.center), "members": c.members, "size": c.size() }))
        .collect();
    let simple: Vec<Value> = (0..spec.len())
        .filter_map(|i| {
            spec.vectors(i).map(|v| {
                json!({
                    "index": i,
                    "eigenvalue": cz(spec.eigenvalues()[i]),
                    "x": cvec(v.x.iter()),
                    "y": cvec(v.y.iter()),
                    "s_min": v.s_min,
                })
            })
        })
        .collect();
    Ok(json!({
        "eigenvalues": cvec(spec.eigenvalues()),
        "tolerance": spec.tolerance(),
        "clusters": clusters,
        "simple": simple,
    }))
}

fn cond(s: &Session, a: &EigArgs) -> Res<Value> {
    let (p, w) = (&s.loaded.problem.poly, &s.loaded.weights);
    let spec = s.spectrum()?;
    let (i, snap) = s.snap(&spec, complex_arg("eig", &a.eig)?)?;
    let (l, v) = s.simple(&spec, i)?;
    let k = cond_simple(p, w, l, &v.x, &v.y)?;
    let k_companion = cond_via_companion(p, w, l, &v.x, &v.y)?;
    let adjugate = match adjugate_quotient(p, w, i, &spec) {
        Ok(q) => json!({
            "cond": q.cond(),
            "weight": q.weight,
            "adj_norm": q.adj_norm,
            "det_leading": q.det_leading,
            "gap_product": q.gap_product(),
            "numerator": q.numerator(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(merge(
        snap,
        json!({
            "cond": k,
            "routes": { "eigenvectors": k, "companion": k_companion, "eigenvector_free": adjugate },
            "weight": w.eval(l.norm(), 0),
            "x": cvec(v.x.iter()),
            "y": cvec(v.y.iter()),
        }),
    ))
}

fn multi_cond(s: &Session, eps: &[f64]) -> Res<Value> {
    let d = s
        .loaded
        .problem
        .multiple
        .as_ref()
        .ok_or_else(|| CliError::Usage("problem file has no [multiple] table".into()))?;
    let k_hat = cond_multiple(&s.loaded.problem.poly, &s.loaded.weights, d.eigenvalue, &d.xhat, &d.yhat)?;
    let radii: Vec<Value> = eps
        .iter()
        .map(|&e| json!({ "eps": e, "radius": (k_hat * e).powf(1.0 / d.p0 as f64) }))
        .collect();
    Ok(json!({
        "eigenvalue": cz(d.eigenvalue),
        "p0": d.p0,
        "k_hat": k_hat,
        "predicted_radii": radii,
    }))
}

fn dist(s: &Session, a: &EigArgs) -> Res<Value> {
    let (p, w) = (&s.loaded.problem.poly, &s.loaded.weights);
    let spec = s.spectrum()?;
    let (i, snap) = s.snap(&spec, complex_arg("eig", &a.eig)?)?;
    let (l, v) = s.simple(&spec, i)?;
    let b = dist_mult_bound(p, w, l, &v.x, &v.y)?;
    let adj = match dist_mult_bound_adj(p, w, i, &spec, &v.x, &v.y) {
        Ok(r) => report(&r),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(merge(snap, json!({ "bound": report(&b), "eigenvector_free": adj })))
}

fn bounds(s: &Session, cmd: &BoundsCommand) -> Res<Value> {
    let (p, w) = (&s.loaded.problem.poly, &s.loaded.weights);
    let (BoundsCommand::Elsner(a) | BoundsCommand::BauerFike(a) | BoundsCommand::Compare(a)) = cmd;
    let mu = complex_arg("mu", &a.mu)?;
    let triple = || {
        s.loaded
            .problem
            .triple
            .as_ref()
            .ok_or_else(|| CliError::Usage("this bound needs a [triple] table in the problem file".into()))
    };
    let gap = eigenvalues(p)?.iter().map(|z| (z - mu).norm()).fold(f64::INFINITY, f64::min);
    let body = match cmd {
        BoundsCommand::Elsner(_) => report(&elsner_bound(p, w, a.eps, mu)?),
        BoundsCommand::BauerFike(_) => report(&bauer_fike_bound(p, w, a.eps, mu, triple()?)?),
        BoundsCommand::Compare(_) => {
            let c = bound_comparator(p, w, a.eps, mu, triple()?)?;
            json!({
                "omega": c.omega,
                "log_omega": c.log_omega,
                "threshold": c.threshold,
                "p_norm": c.p_norm,
                "elsner_tighter": c.elsner_tighter,
                "elsner": report(&c.elsner),
                "bauer_fike": report(&c.bauer_fike),
            })
        }
    };
    Ok(merge(body, json!({ "mu": cz(mu), "eps": a.eps, "gap": gap, "p_norm_at_mu": spectral_norm(&p.eval(mu)) })))
}

/// `re,im,value` rows, real part fastest.
pub fn grid_csv(g: &PseudoGrid) -> String {
    let mut out = String::from("re,im,value\n");
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let z = g.node(ix, iy);
            out.push_str(&format!("{:?},{:?},{:?}\n", z.re, z.im, g.value(ix, iy)));
        }
    }
    out
}

/// `component,seg,re1,im1,re2,im2` rows; `seg` counts within a component.
pub fn contour_csv(c: &ContourSet) -> String {
    let mut out = String::from("component,seg,re1,im1,re2,im2\n");
    let mut counts = vec![0usize; c.components];
    for s in &c.segments {
        let k = counts[s.component];
        counts[s.component] += 1;
        out.push_str(&format!(
            "{},{k},{:?},{:?},{:?},{:?}\n",
            s.component, s.a.re, s.a.im, s.b.re, s.b.im
        ));
    }
    out
}

fn emit(path: &Option<PathBuf>, text: String) -> Res<Value> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(json!({ "path": p.display().to_string() }))
        }
        None => Ok(json!({ "csv": text })),
    }
}

fn pseudo(s: &Session, a: &PseudoArgs) -> Res<Value> {
    let (p, w) = (&s.loaded.problem.poly, &s.loaded.weights);
    let [re0, re1, im0, im1] = a.bbox[..] else {
        return Err(CliError::Usage("--box takes RE_MIN RE_MAX IM_MIN IM_MAX".into()));
    };
    let bbox = GridBox::new(re0, re1, im0, im1)?;
    let grid = grid_eval(p, w, bbox, a.nx, a.ny)?;
    let cs = contours(&grid, a.eps);
    let (ax, ay) = grid.argmin();
    let inside: Vec<Value> = s
        .spectrum()?
        .clusters()
        .iter()
        .map(|c| c.center)
        .filter(|z| z.re >= re0 && z.re <= re1 && z.im >= im0 && z.im <= im1)
        .map(|z| {
            json!({
                "eigenvalue": cz(z),
                "component": cs.component_containing(z),
                "fit_radius": cs.fit_radius(z).ok(),
            })
        })
        .collect();
    Ok(json!({
        "eps": a.eps,
        "bounded": boundedness_check(p, w, a.eps),
        "grid": {
            "nx": grid.nx,
            "ny": grid.ny,
            "box": [re0, re1, im0, im1],
            "min": grid.min(),
            "max": grid.max(),
            "argmin": cz(grid.node(ax, ay)),
            "output": emit(&a.grid_csv, grid_csv(&grid))?,
        },
        "contours": {
            "level": cs.level,
            "segments": cs.segments.len(),
            "components": cs.components,
            "diagnostic": cs.diagnostic,
            "eigenvalues": inside,
            "output": emit(&a.contour_csv, contour_csv(&cs))?,
        },
    }))
}

fn defect(s: &Session, a: &EigArgs) -> Res<Value> {
    let (p, w) = (&s.loaded.problem.poly, &s.loaded.weights);
    let spec = s.spectrum()?;
    let (i, snap) = s.snap(&spec, complex_arg("eig", &a.eig)?)?;
    let (l, v) = s.simple(&spec, i)?;
    let d = defect_perturbation(p, w, l, &v.x, &v.y)?;
    let c = &d.certificate;
    let bound = dist_mult_bound(p, w, l, &v.x, &v.y)?;
    Ok(merge(
        snap,
        json!({
            "delta_hat": mat(&d.delta_hat),
            "perturbed": perturbed_doc(&d.perturbed)?,
            "certificate": {
                "certified": c.is_certified(),
                "pairing_gap": c.pairing_gap,
                "pairing_tol": c.pairing_tol,
                "rank_drop": c.rank_drop,
                "rank_tol": c.rank_tol,
                "chain_residual": c.chain_residual,
                "chain_tol": c.chain_tol,
            },
            "bound": bound.value,
        }),
    ))
}

fn random(s: &Session, eps: f64, stream: u64) -> Res<Value> {
    let (p, w) = (&s.loaded.problem.poly, &s.loaded.weights);
    let (q, used) = random_perturbation_at(p, eps, w, s.cli.seed, stream)?;
    Ok(json!({
        "seed": s.cli.seed,
        "stream": stream,
        "stream_used": used,
        "perturbed": perturbed_doc(&q)?,
    }))
}

fn verify_linearization(s: &Session, points: usize, radius: f64, at: &[f64]) -> Res<Value> {
    let p = &s.loaded.problem.poly;
    let zs = if at.is_empty() {
        let mut rng = ChaCha20Rng::seed_from_u64(s.cli.seed);
        (0..points)
            .map(|_| Complex64::new(rng.random_range(-radius..=radius), rng.random_range(-radius..=radius)))
            .collect()
    } else {
        points_arg(at)
    };
    let c_am = matrix_condition(p.leading());
    let mut worst = 0.0f64;
    let mut rows = Vec::with_capacity(zs.len());
    for z in zs {
        let residual = linearization_residual(p, z)?;
        let allowance = 1e-8 * (1.0 + spectral_norm(&p.eval(z))) * c_am;
        worst = worst.max(residual / allowance);
        rows.push(json!({ "z": cz(z), "residual": residual, "allowance": allowance }));
    }
    Ok(json!({ "points": rows, "worst_ratio": worst, "pass": worst <= 1.0 }))
}

fn verify_triple(s: &Session, at: &[f64], threshold: f64) -> Res<Value> {
    let p = &s.loaded.problem.poly;
    let t = s
        .loaded
        .problem
        .triple
        .as_ref()
        .ok_or_else(|| CliError::Usage("problem file has no [triple] table".into()))?;
    let samples = if at.is_empty() {
        let r = 1.0 + 1.5 * t.blocks().iter().map(|b| b.eigenvalue.norm()).fold(0.0, f64::max);
        [0.3, 2.4, 4.1].iter().map(|&th| Complex64::from_polar(r, th)).collect()
    } else {
        points_arg(at)
    };
    let check = validate_jordan_triple(p, t, &samples)?;
    let rejected: Vec<Value> = check
        .rejected
        .iter()
        .map(|(z, why)| json!({ "z": cz(*z), "reason": why }))
        .collect();
    Ok(json!({
        "k": eigenproblem_cond(t),
        "max_block_size": t.max_block_size(),
        "max_residual": check.max_residual,
        "accepted": cvec(&check.accepted),
        "rejected": rejected,
        "threshold": threshold,
        "pass": check.max_residual <= threshold,
    }))
}
