use std::path::Path;
use std::process::{Command, Output};

use gabor_frames_cli::report::validate_json;
use gabor_frames_cli::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gabor-frames"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn empty_suite_list_prints_empty_array() {
    let o = run(&["verify", "--suites", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[]");
}

#[test]
fn empty_report_csv_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let o = run(&["verify", "--suites", "", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(csv).unwrap().trim(), "suite,check,pass,metric,value");
}

#[test]
fn undersampled_lattice_is_a_diagnosis() {
    let o = run(&["verify", "--suites", "frame-bounds", "--a", "2", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let report = Report::from_json(&stdout(&o)).unwrap();
    let e = report.entries.iter().find(|e| e.check == "frame").unwrap();
    assert_eq!(e.get("frame").and_then(|m| m.as_bool()), Some(false));
    assert!(e.float("A").unwrap() <= 1e-10);
}

#[test]
fn reference_report_has_named_constants() {
    let o = run(&["verify", "--suites", "reconstruction,wexler-raz"]);
    assert_eq!(o.status.code(), Some(0));
    let report = Report::from_json(&stdout(&o)).unwrap();
    let value = |key: &str| report.entries.iter().find_map(|e| e.float(key)).unwrap();
    assert!(value("reconstruction_error") <= 1e-8);
    assert!(value("wexler_raz_residual") <= 1e-8);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--suites", "reconstruction,window-independence,continuity,decay", "--seed", "42"];
    let first = run(&args);
    let second = run(&args);
    let mut par: Vec<&str> = args.to_vec();
    par.push("--parallel");
    let third = run(&par);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, third.stdout);
    validate_json(&stdout(&first)).unwrap();
}

#[test]
fn seed_changes_random_suites() {
    let a = run(&["verify", "--suites", "reconstruction", "--seed", "1"]);
    let b = run(&["verify", "--suites", "reconstruction", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn json_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = run(&["verify", "--suites", "painless", "--json", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&json).unwrap();
    validate_json(&text).unwrap();
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("painless,tight-frame,true,tight_defect,")));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"schema": 2}"#,
        r#"{"seed": 1}"#,
        r#"{"schema": 1, "grid": {"n": 1, "period": 16, "points": 100}, "lattice": {"a": 0.3}}"#,
        r#"{"schema": 1, "unknown": true}"#,
        r#"{"schema": 1, "suites": ["nope"]}"#,
        "not json",
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("c{i}.json"), text);
        let o = run(&["verify", "--config", &path]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["verify", "--config", "/nonexistent/c.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suites", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn field_errors_name_the_field() {
    let o = run(&["verify", "--a", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lattice.a"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.json", r#"{"schema": 1, "suites": ["painless"]}"#);
    let o = run(&["verify", "--config", &path, "--suites", "derivative-identity"]);
    let report = Report::from_json(&stdout(&o)).unwrap();
    assert!(report.entries.iter().all(|e| e.suite == "derivative-identity"));
}

#[test]
fn stft_csv_and_binary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let bin_path = dir.path().join("v.bin");
    let small = ["--points", "32", "--period", "4"];
    let o = run(&[&["stft", "--output", csv.to_str().unwrap()][..], &small].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert!(rows >= 32 * 32);
    let o = run(&[&["stft", "--signal", "oscillation", "--output", bin_path.to_str().unwrap()][..], &small].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::metadata(&bin_path).unwrap().len() > 32 * 32 * 16);
}

#[test]
fn signal_files_on_other_grids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    for (name, code) in [("g.bin", 2), ("g.csv", 3)] {
        let dual = dir.path().join(name);
        let o = run(&["dual-window", "--output", dual.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let o = run(&["stft", "--input", dual.to_str().unwrap(), "--points", "128", "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code), "{name}");
    }
}

#[test]
fn dual_window_certificate() {
    let o = run(&["dual-window"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["frame"], serde_json::Value::Bool(true));
    let text = stdout(&o);
    assert!(text.contains("\"A\""));

    let o = run(&["dual-window", "--a", "2", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["frame"], serde_json::Value::Bool(false));
}

#[test]
fn norms_and_profile() {
    let o = run(&["norms"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let summary = dir.path().join("p.json");
    let o = run(&[
        "profile",
        "--signal",
        "oscillation",
        "--output",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("index,abs_lambda,value,w0"));
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["super_polynomial"], serde_json::Value::Bool(false));
}
