use std::path::PathBuf;
use std::process::Command;

use polycond::bounds::{dist_mult_bound, elsner_bound};
use polycond::condition::cond_simple;
use polycond::fixtures;
use polycond::perturb::random_perturbation_at;
use polycond::spectra::Spectrum;
use polycond::Complex64;
use polycond_cli::{from_fixture, parse_problem};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

struct Out {
    code: i32,
    stdout: Value,
    stderr: Value,
}

fn polycond(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_polycond")).args(args).output().unwrap();
    let parse = |b: &[u8]| {
        let s = String::from_utf8_lossy(b);
        if s.trim().is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&s).unwrap_or_else(|e| panic!("not JSON ({e}): {s}"))
        }
    };
    Out {
        code: out.status.code().unwrap(),
        stdout: parse(&out.stdout),
        stderr: parse(&out.stderr),
    }
}

fn ok(args: &[&str]) -> Value {
    let o = polycond(args);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    o.stdout
}

fn f64_at(v: &Value, path: &str) -> f64 {
    v.pointer(path).and_then(Value::as_f64).unwrap_or_else(|| panic!("{path} missing in {v}"))
}

#[test]
fn fixture_files_match_the_library() {
    for f in fixtures::all() {
        let text = std::fs::read_to_string(fixture(f.name)).unwrap();
        assert_eq!(parse_problem(&text).unwrap(), from_fixture(&f), "{}", f.name);
    }
}

#[test]
fn default_weights_are_coefficient_norms() {
    let p4 = fixture("p4");
    let doc = ok(&["eig", p4.to_str().unwrap()]);
    assert_eq!(doc["weights"]["source"], "norms");
    let w: Vec<f64> = doc["weights"]["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (got, want) in w.iter().zip([25.0379, 2.2919, 1.0]) {
        assert!((got - want).abs() <= 1e-3, "{got} vs {want}");
    }
    assert_eq!(doc["result"]["eigenvalues"].as_array().unwrap().len(), 6);
}

#[test]
fn cond_is_the_library_value() {
    let p5 = fixture("p5");
    let doc = ok(&["cond", p5.to_str().unwrap(), "--eig", "4"]);
    let k = f64_at(&doc, "/result/cond");
    assert!((k - 21.2897).abs() <= 1e-2);

    let f = fixtures::p5();
    let spec = Spectrum::new(&f.poly).unwrap();
    let i = spec.nearest(Complex64::new(4.0, 0.0));
    let v = spec.vectors(i).unwrap();
    let lib = cond_simple(&f.poly, &f.weights, spec.eigenvalues()[i], &v.x, &v.y).unwrap();
    assert_eq!(k.to_bits(), lib.to_bits());
    assert!((f64_at(&doc, "/result/routes/eigenvector_free/cond") - k).abs() <= 1e-6 * k);
    assert!((f64_at(&doc, "/result/routes/companion") - k).abs() <= 1e-6 * k);
}

#[test]
fn header_carries_digest_and_parameters() {
    let p5 = fixture("p5");
    let doc = ok(&["cond", p5.to_str().unwrap(), "--eig", "2", "--seed", "9"]);
    let digest = hex::encode(Sha256::digest(std::fs::read(&p5).unwrap()));
    assert_eq!(doc["input"]["sha256"], digest);
    assert_eq!(doc["command"], "cond");
    assert_eq!(doc["params"]["seed"], 9);
    assert_eq!(doc["params"]["command"]["cond"]["eig"][0], 2.0);
    assert!((f64_at(&doc, "/result/cond") - 7000.0).abs() <= 70.0);
}

#[test]
fn multiple_eigenvalue_condition() {
    let p3 = fixture("p3");
    let doc = ok(&["multi-cond", p3.to_str().unwrap(), "--eps", "1e-4,8e-4"]);
    assert!((f64_at(&doc, "/result/k_hat") - 4.2426).abs() <= 1e-3);
    assert!((f64_at(&doc, "/result/predicted_radii/0/radius") - 0.0206).abs() <= 1e-3);
}

#[test]
fn elsner_and_bauer_fike_on_the_cubic() {
    let p6 = fixture("p6");
    let file = p6.to_str().unwrap();
    let args = ["--eps", "0.3", "--mu", "0.5691", "0.0043"];
    let e = ok(&[&["bounds", "elsner", file][..], &args].concat());
    let value = f64_at(&e, "/result/value");
    assert!((value - 0.8554).abs() <= 1e-3);
    let f = fixtures::p6();
    let lib = elsner_bound(&f.poly, &f.weights, 0.3, Complex64::new(0.5691, 0.0043)).unwrap();
    assert_eq!(value.to_bits(), lib.value.to_bits());
    assert!((f64_at(&e, "/result/gap") - 0.4309).abs() <= 1e-3);

    let b = ok(&[&["bounds", "bauer-fike", file][..], &args].concat());
    assert!((f64_at(&b, "/result/value") - 3.8240).abs() <= 1e-3);
    let c = ok(&[&["bounds", "compare", file][..], &args].concat());
    assert_eq!(c["result"]["elsner_tighter"], true);
    assert!((f64_at(&c, "/result/p_norm") - 1.0562).abs() <= 1e-3);
}

#[test]
fn pseudo_writes_grid_and_contours() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let cont = dir.path().join("contours.csv");
    let p3 = fixture("p3");
    let doc = ok(&[
        "pseudo",
        p3.to_str().unwrap(),
        "--eps",
        "1e-4",
        "--box",
        "0.9",
        "1.1",
        "-0.1",
        "0.1",
        "--nx",
        "101",
        "--ny",
        "81",
        "--grid-csv",
        grid.to_str().unwrap(),
        "--contour-csv",
        cont.to_str().unwrap(),
    ]);
    let g = std::fs::read_to_string(&grid).unwrap();
    let mut lines = g.lines();
    assert_eq!(lines.next(), Some("re,im,value"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101 * 81);
    assert_eq!((rows[0][0], rows[0][1]), (0.9, -0.1));
    assert!((rows[1][0] - 0.902).abs() < 1e-12 && rows[1][1] == -0.1);

    let c = std::fs::read_to_string(&cont).unwrap();
    assert!(c.starts_with("component,seg,re1,im1,re2,im2\n"));
    assert_eq!(c.lines().count() - 1, doc["result"]["contours"]["segments"].as_u64().unwrap() as usize);
    assert_eq!(doc["result"]["contours"]["components"], 1);
    let r = f64_at(&doc, "/result/contours/eigenvalues/0/fit_radius");
    assert!((r - 0.0206).abs() <= 0.05 * 0.0206, "{r}");
}

#[test]
fn pseudo_embeds_csv_without_paths() {
    let p5 = fixture("p5");
    let doc = ok(&["pseudo", p5.to_str().unwrap(), "--eps", "1e-4", "--box", "3.99", "4.01", "-0.01", "0.01", "--nx", "11", "--ny", "11"]);
    let csv = doc["result"]["grid"]["output"]["csv"].as_str().unwrap();
    assert_eq!(csv.lines().count(), 1 + 121);
}

#[test]
fn pseudo_is_thread_count_independent() {
    let p6 = fixture("p6");
    let run = |threads: &str| {
        let doc = ok(&["pseudo", p6.to_str().unwrap(), "--eps", "0.3", "--box", "-1.5", "1.5", "-1", "1", "--nx", "61", "--ny", "41", "--threads", threads]);
        (doc["result"]["grid"]["output"].clone(), doc["result"]["contours"]["output"].clone())
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn random_perturbation_is_seeded() {
    let p4 = fixture("p4");
    let file = p4.to_str().unwrap();
    let a = ok(&["perturb", "random", file, "--eps", "1e-2", "--seed", "3", "--stream", "5"]);
    let b = ok(&["perturb", "random", file, "--eps", "1e-2", "--seed", "3", "--stream", "5", "--threads", "2"]);
    let c = ok(&["perturb", "random", file, "--eps", "1e-2", "--seed", "4", "--stream", "5"]);
    assert_eq!(a["result"], b["result"]);
    assert_ne!(a["result"]["perturbed"]["deltas"], c["result"]["perturbed"]["deltas"]);
    assert_eq!(a["result"]["perturbed"]["admissibility"]["admissible"], true);

    let f = fixtures::p4();
    let (q, _) = random_perturbation_at(&f.poly, 1e-2, &f.weights, 3, 5).unwrap();
    let d00 = &q.deltas()[0][(0, 0)];
    assert_eq!(f64_at(&a, "/result/perturbed/deltas/0/0/0/0").to_bits(), d00.re.to_bits());
    assert_eq!(f64_at(&a, "/result/perturbed/deltas/0/0/0/1").to_bits(), d00.im.to_bits());
}

#[test]
fn distance_bound_and_defect() {
    let p4 = fixture("p4");
    let file = p4.to_str().unwrap();
    let d = ok(&["dist", file, "--eig", "-1"]);
    let f = fixtures::p4();
    let spec = Spectrum::new(&f.poly).unwrap();
    let i = spec.nearest(Complex64::new(-1.0, 0.0));
    let v = spec.vectors(i).unwrap();
    let lib = dist_mult_bound(&f.poly, &f.weights, spec.eigenvalues()[i], &v.x, &v.y).unwrap();
    assert_eq!(f64_at(&d, "/result/bound/value").to_bits(), lib.value.to_bits());

    let q = ok(&["perturb", "defect", file, "--eig", "0.25", "-3.8971"]);
    assert_eq!(q["result"]["certificate"]["certified"], true);
    assert!(f64_at(&q, "/result/snap_distance") < 1e-3);
    assert!(f64_at(&q, "/result/perturbed/eps_used") <= f64_at(&q, "/result/bound"));
}

#[test]
fn verification_subcommands() {
    for name in ["p3", "p4", "p5", "p6"] {
        let doc = ok(&["verify", "linearization", fixture(name).to_str().unwrap(), "--seed", "1"]);
        assert_eq!(doc["result"]["pass"], true, "{name}");
        assert_eq!(doc["result"]["points"].as_array().unwrap().len(), 20);
    }
    let t = ok(&["verify", "triple", fixture("p6").to_str().unwrap(), "--at", "2", "0", "--at", "0", "0.5", "--at", "-1", "1"]);
    assert_eq!(t["result"]["pass"], true);
    assert_eq!(t["result"]["accepted"].as_array().unwrap().len(), 3);
    assert!((f64_at(&t, "/result/k") - 6.4183).abs() <= 1e-3);
    let t = ok(&["verify", "triple", fixture("p3").to_str().unwrap()]);
    assert_eq!(t["result"]["pass"], true);
}

#[test]
fn weights_flag_overrides_the_file() {
    let p5 = fixture("p5");
    let doc = ok(&["cond", p5.to_str().unwrap(), "--eig", "4", "--weights", "2,2,2"]);
    assert_eq!(doc["weights"]["source"], "flag");
    assert!((f64_at(&doc, "/result/cond") - 2.0 * 21.2897).abs() <= 2e-2);
    let doc = ok(&["cond", p5.to_str().unwrap(), "--eig", "4", "--weights", "norms"]);
    assert_eq!(doc["weights"]["source"], "norms");
    let bad = polycond(&["cond", p5.to_str().unwrap(), "--eig", "4", "--weights", "1,1"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn exit_codes_and_error_documents() {
    let usage = polycond(&["cond"]);
    assert_eq!(usage.code, 2);
    assert_eq!(usage.stderr["error"]["kind"], "usage");
    assert_eq!(usage.stdout, Value::Null);

    let missing = polycond(&["eig", "/nonexistent/problem.toml"]);
    assert_eq!((missing.code, missing.stderr["error"]["kind"].as_str()), (2, Some("io")));

    let dir = tempfile::tempdir().unwrap();
    let singular = dir.path().join("singular.toml");
    std::fs::write(&singular, "n = 1\nm = 1\ncoeffs = [[[1]], [[0]]]\n").unwrap();
    let e = polycond(&["eig", singular.to_str().unwrap()]);
    assert_eq!(e.code, 2);
    assert_eq!(e.stderr["error"]["kind"], "problem_file");
    assert_eq!(e.stderr["error"]["field"], "coeffs");

    let p5 = fixture("p5");
    let far = polycond(&["cond", p5.to_str().unwrap(), "--eig", "7"]);
    assert_eq!((far.code, far.stderr["error"]["kind"].as_str()), (1, Some("analysis")));

    // P'(0) = A_1 is singular for this problem.
    let p4 = fixture("p4");
    let sing = polycond(&["dist", p4.to_str().unwrap(), "--eig", "0"]);
    assert_eq!(sing.code, 1);
    assert!(sing.stderr["error"]["message"].as_str().unwrap().contains("singular"));

    let nt = polycond(&["bounds", "bauer-fike", p4.to_str().unwrap(), "--eps", "0.1", "--mu", "0"]);
    assert_eq!(nt.code, 2);
}
