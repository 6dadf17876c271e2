use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE: &str = include_str!("../../core/fixtures/q1_q2_spinor.json");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfsign")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn q1_file(dir: &Path) -> String {
    write(dir, "q1.json", r#"{"name": "Q1", "gram": [[2, 0, 0], [0, 96, 0], [0, 0, 288]]}"#)
}

#[test]
fn theta_rows() {
    let dir = tempfile::tempdir().unwrap();
    let form = q1_file(dir.path());
    let out = run(&["theta", "--form", &form, "--n-max", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "n,r\n0,1\n1,2\n2,0\n");
    let out = run(&["theta", "--form", &form, "--n-max", "0"]);
    assert_eq!(stdout(&out), "n,r\n0,1\n");
}

#[test]
fn theta_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let form = q1_file(dir.path());
    let dest = dir.path().join("theta.json");
    let out = run(&["theta", "--form", &form, "--n-max", "49", "--format", "json", "--out", dest.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let doc: Value = serde_json::from_str(&fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(doc["r"][1], 2);
    assert_eq!(doc["r"][49], 2 + 4);
}

#[test]
fn theta_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    assert_eq!(code(&run(&["theta", "--form", missing.to_str().unwrap(), "--n-max", "3"])), 2);
    let typo = write(dir.path(), "typo.json", r#"{"name": "x", "grm": [[2,0,0],[0,2,0],[0,0,2]]}"#);
    let out = run(&["theta", "--form", &typo, "--n-max", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("grm"));
    let indefinite = write(dir.path(), "indef.json", r#"{"name": "x", "gram": [[2,0,0],[0,2,0],[0,0,-2]]}"#);
    let out = run(&["theta", "--form", &indefinite, "--n-max", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("positive definite"));
    assert_eq!(code(&run(&["theta", "--n-max", "3"])), 2);
}

#[test]
fn counterexample_default_bound() {
    let out = run(&["counterexample"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["a_f_t"], "-1/1");
    assert_eq!(doc["inert_sign_changes"], 0);
    let checked: Vec<&Value> = doc["inert"].as_array().unwrap().iter().filter(|r| r["excluded"] == false).collect();
    assert_eq!(checked.len(), 12);
    assert!(checked.iter().all(|r| r["a_f"] == "-1/1" && r["stable"] == true));
    assert!(doc["split_sign_changes"].as_u64().unwrap() >= 1);
}

#[test]
fn counterexample_bound_two() {
    let out = run(&["counterexample", "--prime-bound", "2"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["inert"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["p"], 2);
}

#[test]
fn counterexample_csv() {
    let out = run(&["counterexample", "--prime-bound", "20", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("p,r_class_0,r_class_1,r_spn,a_f,stable\n2,"));
    assert!(text.contains("\n5,2,0,1/1,-1/1,true\n"));
}

#[test]
fn counterexample_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let corrupted = write(
        dir.path(),
        "corrupt.json",
        &FIXTURE.replacen("\"aut_order\": 8", "\"aut_order\": 16", 1),
    );
    let out = run(&["counterexample", "--classes", &corrupted]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("inconsistent"));
    let missing = dir.path().join("nothing.json");
    assert_eq!(code(&run(&["counterexample", "--classes", missing.to_str().unwrap()])), 2);
    let truncated = write(dir.path(), "trunc.json", &FIXTURE[..FIXTURE.len() / 2]);
    assert_eq!(code(&run(&["counterexample", "--classes", &truncated])), 2);
}

#[test]
fn counterexample_other_class_and_field() {
    // with Q1 distinguished, a_f(p², Q1) = +1 on the inert branch as well
    let dir = tempfile::tempdir().unwrap();
    let q1 = write(dir.path(), "q1set.json", &FIXTURE.replace("\"distinguished\": 1", "\"distinguished\": 0"));
    let out = run(&["counterexample", "--classes", &q1]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["a_f_t"], "1/1");
    // D = 5 is not the CM field, so constancy fails
    let out = run(&["counterexample", "--disc", "5", "--prime-bound", "60"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn scan_reports() {
    let out = run(&["scan", "--disc", "-3", "--eps", "-", "--prime-bound", "100", "--exclude-level", "576"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["count"], 0);
    assert_eq!(doc["primes"][0], 5);
    for eps in ["+", "-"] {
        let out = run(&["scan", "--disc", "5", "--eps", eps, "--prime-bound", "1e4"]);
        let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(doc["count"].as_u64().unwrap() >= 1, "eps {eps}");
    }
}

#[test]
fn scan_csv_series() {
    let dir = tempfile::tempdir().unwrap();
    let mut zero = String::from("n,numerator,denominator\n");
    for n in 1..=50 {
        zero.push_str(&format!("{n},0,1\n"));
    }
    let path = write(dir.path(), "zero.csv", &zero);
    let out = run(&["scan", "--series", &path, "--disc", "-3", "--eps", "+", "--prime-bound", "50"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["count"], 0);
    let out = run(&["scan", "--series", &path, "--disc", "-3", "--eps", "+", "--prime-bound", "100"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["scan", "--disc", "1", "--eps", "+", "--prime-bound", "10"])), 2);
    assert_eq!(code(&run(&["scan", "--disc", "-3", "--eps", "0", "--prime-bound", "10"])), 2);
}

#[test]
fn lift_output() {
    let out = run(&["lift", "--n-max", "30", "--disc", "-3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["weight"], 2);
    assert_eq!(doc["level"], 288);
    assert_eq!(doc["cm"]["compatible"], true);
    assert_eq!(doc["values"][0], "-1/1");
    let out = run(&["lift", "--n-max", "5"]);
    assert!(stdout(&out).starts_with("n,numerator,denominator\n1,-1,1\n"));
    assert_eq!(code(&run(&["lift"])), 2);
}

#[test]
fn diag_fits() {
    let out = run(&["diag", "--disc", "-3", "--eps", "-", "--thresholds", "1000,10000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let c: f64 = text.lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(c.abs() <= 0.05);
    let out = run(&["diag", "--disc", "-3", "--eps", "+", "--thresholds", "1000,10000", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["fitted_c"].as_f64().unwrap() >= 0.05);
    assert_eq!(code(&run(&["diag", "--disc", "-3", "--eps", "+", "--thresholds", "1000"])), 2);
    assert_eq!(code(&run(&["diag", "--disc", "-3", "--eps", "+", "--thresholds", "1000", "--no-fit"])), 0);
}

#[test]
fn diag_mertens() {
    let out = run(&["diag", "--mertens", "--psi", r#"{"kronecker": -4}"#, "--disc", "5", "--eps", "+", "--thresholds", "1e6"]);
    assert_eq!(code(&out), 0);
    let line = stdout(&out).lines().nth(1).unwrap().to_string();
    let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 0.25).abs() < 0.25 * 0.25);
    assert_eq!(code(&run(&["diag", "--mertens", "--disc", "5", "--eps", "+", "--thresholds", "100"])), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["counterexample", "--prime-bound", "200", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}
