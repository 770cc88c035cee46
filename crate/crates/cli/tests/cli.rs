use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fockqha"));
    c.env("FOCKQHA_THREADS", "1");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SQRT_PI: f64 = 1.7724538509055159;

fn von_neumann(dir: &Path) -> String {
    write(dir, "vn.json", &format!(r#"{{"d": 1, "lattice_gens": [[{SQRT_PI}, 0.0], [0.0, {SQRT_PI}]]}}"#))
}

/// CSV rows as columns of floats, header dropped.
fn csv_rows(s: &str) -> Vec<Vec<f64>> {
    s.lines()
        .skip(1)
        .map(|l| l.split(',').take_while(|c| !c.starts_with('"')).map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn classify_von_neumann_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["group", "classify", &von_neumann(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lagrangian"], true);
    assert_eq!(v["commutative"], true);
}

#[test]
fn annihilator_of_the_integer_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "z2.json", r#"{"d": 1, "lattice_gens": [[1.0, 0.0], [0.0, 1.0]]}"#);
    let o = run(&["group", "annihilate", &g]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let gens: Vec<Vec<f64>> = serde_json::from_value(v["lattice_gens"].clone()).unwrap();
    assert_eq!(gens.len(), 2);
    // the dual of Z² under σ is π Z²
    for g in &gens {
        for c in g {
            let k = c / std::f64::consts::PI;
            assert!((k - k.round()).abs() < 1e-12, "{gens:?}");
        }
    }
    let det = gens[0][0] * gens[1][1] - gens[0][1] * gens[1][0];
    assert!((det.abs() - std::f64::consts::PI.powi(2)).abs() < 1e-10);
}

#[test]
fn group_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["group", "annihilate", &von_neumann(dir.path())]);
    let again = write(dir.path(), "ann.json", &stdout(&o));
    let o2 = run(&["group", "annihilate", &again]);
    assert!(o2.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o2)).unwrap();
    assert_eq!(v["d"], 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"d": 1, "lattice_gens": [[1.0, 0.0], [2.0, 0.0], [0.5, 0.0]]}"#);
    assert_eq!(run(&["group", "classify", &bad]).status.code(), Some(2));
    let garbage = write(dir.path(), "garbage.json", "not json");
    assert_eq!(run(&["group", "classify", &garbage]).status.code(), Some(2));
    assert_eq!(run(&["op", "weyl", "--z", "1.0"]).status.code(), Some(2));
    let z2 = write(dir.path(), "z2.json", r#"{"d": 1, "lattice_gens": [[1.0, 0.0], [0.0, 1.0]]}"#);
    let o = run(&["group", "normal-form", &z2]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn lattice_transform_of_weyl_operator_is_a_character() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--n", "40", "op", "weyl", "--z", &SQRT_PI.to_string(), "0"]);
    assert!(o.status.success());
    let op = write(dir.path(), "w.json", &stdout(&o));
    let o = run(&["--n", "40", "--k", "4", "--no-certify", "gelfand", "lattice", "--op", &op, "--torus", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("theta1,theta2,re,im,est_error,status\n"));
    for r in csv_rows(&out) {
        // γ(W_{√π}) (λ) = λ₁⁻¹
        let (re, im) = (r[0].cos(), -r[0].sin());
        assert!((r[2] - re).abs() < 1e-5 && (r[3] - im).abs() < 1e-5, "{r:?}");
    }
}

#[test]
fn horizontal_transform_of_constant_profile() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "h.json", r#"{"type": "horizontal", "profile": "constant", "c": 1.0}"#);
    let o = run(&["--no-certify", "gelfand", "horizontal", "--symbol-file", &f, "--x-steps", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!((r[1] - 1.0).abs() < 1e-8 && r[2].abs() < 1e-8);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--n", "12", "op", "toeplitz", "--symbol", "gaussian", "--center", "0.3", "-0.2", "--width", "1.5"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args).stdout);
    let out = dir.path().join("t.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    assert!(run(&with_out).status.success());
    assert_eq!(fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "n = 5\nformat = \"json\"\n");
    let o = run(&["--config", &cfg, "op", "weyl", "--z", "0.1", "0.2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 5);
    let o = run(&["--config", &cfg, "--n", "7", "op", "weyl", "--z", "0.1", "0.2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 7);
    let bad = write(dir.path(), "bad.toml", "n = 5\nunknown = 1\n");
    assert_eq!(run(&["--config", &bad, "op", "weyl", "--z", "0", "0"]).status.code(), Some(2));
}

#[test]
fn berezin_rows_in_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--n", "30", "op", "weyl", "--z", "0", "0"]);
    let id = write(dir.path(), "id.json", &stdout(&o));
    let o = run(&["--n", "30", "--format", "csv", "op", "berezin", "--op", &id, "--z", "0.2", "0.1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("x1,y1,re,im\n"));
    let r = &csv_rows(&out)[0];
    assert!((r[2] - 1.0).abs() < 1e-12 && r[3].abs() < 1e-12);
}

#[test]
fn verify_subgroup_suite_passes() {
    let o = run(&["verify", "subgroup"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object() || v.is_array());
}
