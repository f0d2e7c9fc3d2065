use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn gleason(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gleason")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_matrix(dir: &Path, name: &str, re: &[&[f64]]) -> PathBuf {
    let d = re.len();
    let im = vec![vec![0.0; d]; d];
    let path = dir.join(name);
    fs::write(&path, serde_json::json!({"dim": d, "re": re, "im": im}).to_string()).unwrap();
    path
}

fn distance(stdout: &str) -> f64 {
    serde_json::from_str::<Value>(stdout.trim()).unwrap()["distance"].as_f64().unwrap()
}

#[test]
fn gen_one_dimension_is_unit_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.json");
    assert_eq!(gleason(&["gen", "--dim", "1", "--out", p(&out)]).0, 0);
    let m = read(&out);
    assert_eq!(m["re"], serde_json::json!([[1.0]]));
    assert_eq!(m["im"], serde_json::json!([[0.0]]));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        assert_eq!(gleason(&["gen", "--dim", "3", "--rank", "1", "--seed", "7", "--out", p(out)]).0, 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn generated_state_verifies_as_density() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    gleason(&["gen", "--dim", "4", "--rank", "4", "--out", p(&state)]);
    let report = dir.path().join("checks.json");
    let (code, stdout) = gleason(&["verify", "--in", p(&state), "--suite", "density", "--tol", "1e-10", "--out", p(&report)]);
    assert_eq!(code, 0);
    assert!(stdout.contains("density") && stdout.contains("pass"));
    let checks = read(&report);
    assert_eq!(checks[0]["check"], "density");
    assert_eq!(checks[0]["pass"], true);
}

#[test]
fn explicit_report_fields() {
    let (code, stdout) = gleason(&["reconstruct", "--method", "explicit", "--dim", "3", "--shots", "0"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(r["method"], "explicit");
    assert_eq!(r["query_count"], 15);
    assert!(r["residual"].as_f64().unwrap() <= 1e-12);
    assert!(r.get("estimate").is_some() && r.get("repaired").is_some());
}

#[test]
fn pauli_matches_explicit_on_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("pauli.json"), dir.path().join("explicit.json"));
    assert_eq!(gleason(&["reconstruct", "--method", "pauli2d", "--seed", "3", "--out", p(&a)]).0, 0);
    assert_eq!(gleason(&["reconstruct", "--method", "explicit", "--dim", "2", "--seed", "3", "--out", p(&b)]).0, 0);
    let (code, stdout) = gleason(&["compare", p(&a), p(&b), "--tol", "1e-12"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(read(&a)["bloch"].is_object());
}

#[test]
fn haar_average_single_basis_has_unit_trace() {
    let (code, stdout) = gleason(&["reconstruct", "--method", "haar-average", "--dim", "3", "--num-bases", "1"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&stdout).unwrap();
    let re = r["estimate"]["re"].as_array().unwrap();
    let trace: f64 = (0..3).map(|i| re[i][i].as_f64().unwrap()).sum();
    assert!((trace - 1.0).abs() <= 1e-10);
}

#[test]
fn haar_moment_suite_passes() {
    let (code, stdout) = gleason(&["verify", "--suite", "haar-moment", "--dim", "3", "--samples", "100000"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("haar-moment"));
}

#[test]
fn compare_examples() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = write_matrix(dir.path(), "mixed.json", &[&[0.5, 0.0], &[0.0, 0.5]]);
    let pure = write_matrix(dir.path(), "pure.json", &[&[1.0, 0.0], &[0.0, 0.0]]);
    let (code, stdout) = gleason(&["compare", p(&mixed), p(&mixed)]);
    assert_eq!((code, distance(&stdout)), (0, 0.0));
    let (code, stdout) = gleason(&["compare", p(&mixed), p(&pure), "--tol", "1"]);
    assert_eq!(code, 0);
    assert!((distance(&stdout) - 0.5f64.sqrt()).abs() < 1e-15);
    assert_eq!(gleason(&["compare", p(&mixed), p(&pure)]).0, 4);
}

#[test]
fn explicit_and_implicit_agree() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    gleason(&["gen", "--dim", "4", "--seed", "12", "--out", p(&state)]);
    let (a, b) = (dir.path().join("e.json"), dir.path().join("i.json"));
    assert_eq!(gleason(&["reconstruct", "--method", "explicit", "--in", p(&state), "--out", p(&a)]).0, 0);
    assert_eq!(gleason(&["reconstruct", "--method", "implicit", "--in", p(&state), "--out", p(&b)]).0, 0);
    assert_eq!(gleason(&["compare", p(&a), p(&b), "--tol", "1e-6"]).0, 0);
    assert_eq!(read(&b)["eigenvalues"].as_array().unwrap().len(), 4);
}

#[test]
fn tabulated_oracle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    gleason(&["gen", "--dim", "3", "--real", "--seed", "2", "--out", p(&state)]);
    for method in ["explicit", "explicit-real"] {
        let table = dir.path().join(format!("{method}-table.json"));
        let report = dir.path().join(format!("{method}-report.json"));
        assert_eq!(gleason(&["tabulate", "--in", p(&state), "--method", method, "--out", p(&table)]).0, 0);
        assert!(read(&table).is_array());
        assert_eq!(gleason(&["reconstruct", "--method", method, "--in", p(&table), "--out", p(&report)]).0, 0);
        assert_eq!(gleason(&["compare", p(&state), p(&report), "--tol", "1e-12"]).0, 0);
    }
    // A table of the standard-basis rays cannot answer queries in another basis.
    let table = dir.path().join("explicit-table.json");
    assert_eq!(gleason(&["reconstruct", "--in", p(&table), "--basis", "haar", "--seed", "9"]).0, 3);
}

#[test]
fn tabulate_explicit_vector_list() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_matrix(dir.path(), "s.json", &[&[0.75, 0.0], &[0.0, 0.25]]);
    let vectors = dir.path().join("v.json");
    fs::write(&vectors, r#"[{"dim": 2, "re": [0.0, 1.0], "im": [0.0, 0.0]}]"#).unwrap();
    let (code, stdout) = gleason(&["tabulate", "--in", p(&state), "--vectors", p(&vectors)]);
    assert_eq!(code, 0);
    let table: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(table[0]["value"], 0.25);
}

#[test]
fn usage_errors() {
    assert_eq!(gleason(&["--help"]).0, 0);
    assert_eq!(gleason(&["reconstruct"]).0, 2);
    assert_eq!(gleason(&["reconstruct", "--method", "simplex", "--dim", "2"]).0, 2);
    assert_eq!(gleason(&["reconstruct", "--dim", "3", "--tol", "1e-9"]).0, 2);
    assert_eq!(gleason(&["verify", "--suite", "haar-moment", "--samples", "10"]).0, 2);
    assert_eq!(gleason(&["gen", "--dim", "2", "--rank", "3"]).0, 2);
}

#[test]
fn missing_input_is_an_input_error() {
    assert_eq!(gleason(&["reconstruct", "--in", "/nonexistent/state.json"]).0, 3);
}

#[test]
fn verify_all_on_generated_state() {
    let (code, stdout) = gleason(&["verify", "--dim", "3", "--samples", "20000"]);
    assert_eq!(code, 0, "{stdout}");
    for check in ["density", "additivity", "basis-independence", "transition", "unistochastic", "haar-moment"] {
        assert!(stdout.contains(check), "{check}");
    }
}
