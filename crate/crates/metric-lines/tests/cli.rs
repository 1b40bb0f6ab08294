//! End-to-end tests of the binary: exit codes, JSON output, and sweep
//! determinism.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metric-lines"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn validate_builtin_succeeds() {
    let out = run(&["validate", "--builtin", "C5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("valid metric on 5 points"));
}

#[test]
fn validate_reports_triangle_violation() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "0,1,5\n1,0,1\n5,1,0\n").unwrap();
    let out = run(&["validate", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("d(0,2)"), "violating indices missing: {err}");
}

#[test]
fn validate_rejects_malformed_csv() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "0,banana\nbanana,0\n").unwrap();
    let out = run(&["validate", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn lines_json_matches_catalog() {
    let out = run(&["lines", "--builtin", "C5", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["line_count"], 10);
    assert_eq!(doc["universal"], serde_json::Value::Null);
    assert_eq!(doc["lines"].as_array().unwrap().len(), 10);
}

#[test]
fn structure_rejects_unknown_line() {
    let out = run(&["structure", "--builtin", "C5", "--line", "0,1,2,3,4"]);
    assert_eq!(code(&out), 6);
}

#[test]
fn structure_rejects_out_of_range_level() {
    let out = run(&[
        "structure", "--builtin", "P6", "--line", "0,1,2,3,4,5", "--k", "9",
    ]);
    assert_eq!(code(&out), 7);
}

#[test]
fn structure_pair_selector_resolves() {
    let out = run(&["structure", "--builtin", "P6", "--line", "pair:0,5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("height 5"));
}

#[test]
fn witness_refuses_universal_line() {
    let out = run(&["witness", "--builtin", "P6"]);
    assert_eq!(code(&out), 8);
}

#[test]
fn witness_json_is_schema_shaped() {
    let out = run(&["witness", "--builtin", "C5", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["m"], 10);
    assert_eq!(doc["certified_lower_bound"], 10);
    assert!(doc["families"].is_array());
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let args = [
        "sweep", "--random", "25", "--n", "6", "--seed", "11", "--check",
        "conjecture,audit,witness",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&first).lines().count(), 25);
}

#[test]
fn sweep_requires_seed_for_random() {
    let out = run(&["sweep", "--random", "5", "--n", "4"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn generate_round_trips_through_validate() {
    let out = run(&["generate", "--random", "6", "--seed", "42"]);
    assert_eq!(code(&out), 0);
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(&out.stdout).unwrap();
    let check = run(&["validate", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code(&check), 0);
}

#[test]
fn help_documents_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Exit codes"));
}
