use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biunitary")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fourier_round_trips_through_check_hadamard() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f3.json");
    let out = run(&["fourier", "3", "--out", f.to_str().unwrap()]);
    assert!(out.status.success());
    let out = run(&["check-hadamard", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn biunitary_pair_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["--json", report.to_str().unwrap(), "biunitary", "--pair", "fourier:2", "fourier:2", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let json = read_json(&report);
    assert_eq!(json["overall"], Value::Bool(true));
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["pass"] == Value::Bool(true)));
    assert!(json["tool_version"].as_str().unwrap().starts_with("biunitary"));
}

#[test]
fn non_biunitary_matrix_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f4.json");
    assert!(run(&["fourier", "4", "--out", f.to_str().unwrap()]).status.success());
    // F_4 is unitary but its block transpose over (2,2) is not.
    let out = run(&["biunitary", f.to_str().unwrap(), "--split", "2,2"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(run(&["check-hadamard", "/nonexistent/matrix.json"]).status.code(), Some(2));
    assert_eq!(run(&["scenario", "irreducible", "--n", "5"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"legs":[2],"data":[[1.0,0.0]]}"#).unwrap();
    assert_eq!(run(&["check-hadamard", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn scenarios_report_expected_values() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("chain.json");
    let out = run(&["--json", report.to_str().unwrap(), "scenario", "chain-isomorphism", "--n", "3", "--shift", "1", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let json = read_json(&report);
    let period = json["checks"].as_array().unwrap().iter().find(|c| c["name"] == "outer_period").unwrap();
    assert_eq!(period["value"], Value::from(3));

    let out = run(&["scenario", "noncommutativity", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn over_budget_is_refused() {
    let out = run(&["--max-order", "8", "scenario", "diagonal-fourier", "--n", "3", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let mut v = read_json(p);
        v["timing_ms"] = Value::from(0);
        v
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["--seed", "7", "--json", p.to_str().unwrap(), "scenario", "biunitarity", "--orders", "2,3", "--levels", "0", "--samples", "6"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(strip(&a), strip(&b));
}
