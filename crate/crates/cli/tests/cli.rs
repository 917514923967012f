use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const TOY: &str = r#"{"designs": [
    {"design": "pbib2", "scheme": {"scheme": "gd", "a": 2, "f": 3}},
    {"design": "sts", "g": 4}
], "eta": [1, 2, 3, 4, 5, 10, 15, 20], "s": [1, 2]}"#;

fn kps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kps")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(csv: &'a str, metric: &str, parameter: &str) -> Option<&'a str> {
    csv.lines().find_map(|l| {
        let mut f = l.splitn(3, ',');
        (f.next() == Some(metric) && f.next() == Some(parameter)).then(|| f.next().unwrap())
    })
}

fn error_kind(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is a JSON error object");
    assert_eq!(v["schema"], 1);
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn analyze_toy_row() {
    let o = kps(&["analyze", TOY]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# schema=1\nmetric,parameter,value\n"));
    assert_eq!(value(&out, "n", ""), Some("54"));
    assert_eq!(value(&out, "k", ""), Some("7"));
    assert_eq!(value(&out, "pr1", ""), Some("0.6981"));
    let row: Vec<&str> = ["1", "2", "3", "4", "5", "10", "15", "20"]
        .iter()
        .map(|eta| value(&out, "pr", eta).unwrap())
        .collect();
    assert_eq!(row, ["0.8665", "0.9409", "0.9739", "0.9884", "0.9949", "0.9999", "1.0000", "1.0000"]);
}

#[test]
fn analyze_triangular_parameters() {
    let spec = r#"{"designs": [{"design": "pbib2", "scheme": {"scheme": "triangular", "m": 9}},
                               {"design": "sts", "g": 27}], "eta": [1]}"#;
    let out = stdout(&kps(&["analyze", spec]));
    assert_eq!(
        (value(&out, "v", ""), value(&out, "n", ""), value(&out, "k", "")),
        (Some("873"), Some("1980"), Some("48"))
    );
}

#[test]
fn precision_and_json_format() {
    let o = kps(&["--format", "json", "--precision", "6", "analyze", TOY, "--eta", "1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let pr1 = v["rows"].as_array().unwrap().iter().find(|r| r["metric"] == "pr1").unwrap();
    assert_eq!(pr1["value"], "0.698113");
}

#[test]
fn empty_eta_is_usage_error() {
    let o = kps(&["analyze", r#"{"designs": [{"design": "sts", "g": 4}]}"#]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "usage");
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(kps(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kps(&["analyze", "{not json"]).status.code(), Some(1));
    assert_eq!(kps(&["analyze", "/nonexistent/spec.json"]).status.code(), Some(1));
    let mismatch = r#"{"designs": [{"design": "sts", "g": 4}], "q": 2, "eta": [1]}"#;
    assert_eq!(kps(&["analyze", mismatch]).status.code(), Some(1));
}

#[test]
fn invalid_designs_exit_2() {
    for spec in [
        r#"{"design": "sts", "g": 5}"#,
        r#"{"design": "latin_pbib", "p": 6, "k": 4}"#,
        r#"{"design": "explicit", "v": 4, "blocks": [[0, 1], [1, 2], [2, 3], [0, 1]]}"#,
    ] {
        let o = kps(&["design", spec]);
        assert_eq!(o.status.code(), Some(2), "{spec}");
        assert_eq!(error_kind(&o), "invalid_design");
    }
}

#[test]
fn scheme_reports_tables() {
    let out = stdout(&kps(&["scheme", r#"{"scheme": "triangular", "m": 5}"#]));
    assert_eq!(value(&out, "v", ""), Some("10"));
    assert_eq!(value(&out, "theta", "1"), Some("6"));
    assert_eq!(value(&out, "theta", "2"), Some("3"));
    assert_eq!(value(&out, "validation", ""), Some("pass"));
}

#[test]
fn exported_design_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gd.json");
    let o = kps(&["--out", path.to_str().unwrap(), "design", "--export",
        r#"{"design": "pbib2", "scheme": {"scheme": "gd", "a": 3, "f": 4}}"#]);
    assert_eq!(o.status.code(), Some(0));
    let exported = fs::read_to_string(&path).unwrap();
    let by_ref = r#"{"designs": [{"design": "pbib2", "scheme": {"scheme": "gd", "a": 3, "f": 4}},
                                 {"design": "sts", "g": 7}], "eta": [1, 5], "s": [1, 2]}"#;
    let by_value = format!(r#"{{"designs": [{exported}, {{"design": "sts", "g": 7}}], "eta": [1, 5], "s": [1, 2]}}"#);
    assert_eq!(stdout(&kps(&["analyze", by_ref])), stdout(&kps(&["analyze", &by_value])));
}

#[test]
fn verify_toy_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("toy.json");
    fs::write(&spec, TOY).unwrap();
    let args = ["--seed", "42", "--trials", "20000", "verify", spec.to_str().unwrap()];
    let first = kps(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let out = stdout(&first);
    assert!(!out.lines().any(|l| l.starts_with("status,") && l.ends_with(",fail")));
    assert_eq!(value(&out, "pr1_enumerated", ""), Some("0.6981"));
    assert_eq!(first.stdout, kps(&args).stdout);
}

#[test]
fn tampered_design_is_rejected() {
    let exported = stdout(&kps(&["design", "--export", r#"{"design": "sts", "g": 4}"#]));
    let mut spec: Value = serde_json::from_str(&exported).unwrap();
    let blocks = spec["blocks"].as_array_mut().unwrap();
    // Duplicate a block: its pairs are now covered twice.
    blocks[0] = blocks[1].clone();
    let o = kps(&["design", &spec.to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("verification"), "{v}");
}

#[test]
fn discover_worked_examples() {
    let o = kps(&["discover", "1:6:4:0", "1:6:6:0", "--a", "2", "--f", "23", "--g", "22"]);
    let keys: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(keys.len(), 24);
    assert!(keys.contains(&"015".to_string()));
    assert!(keys.contains(&"1.2.6.23".to_string()));

    let o = kps(&["--format", "json", "discover", "2:2:5:1", "1:3:6:2", "--a", "2", "--f", "23", "--g", "22"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["keys"], serde_json::json!(["1232", "116"]));
}

#[test]
fn discover_generic_fallback() {
    let o = kps(&["discover", "1:1:0", "2:2:5", "--a", "2", "--f", "3", "--g", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# note:"));
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn discover_rejects_bad_labels() {
    let o = kps(&["discover", "9:9:9:9", "1:1:0:0", "--a", "2", "--f", "3", "--g", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "usage");
}

#[test]
fn paper_tables_written() {
    let dir = tempfile::tempdir().unwrap();
    let o = kps(&["--out", dir.path().to_str().unwrap(), "paper-tables"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
    let read = |id: &str| fs::read_to_string(dir.path().join(format!("example-{id}.csv"))).unwrap();
    let toy = read("toy");
    assert_eq!(value(&toy, "pr", "1"), Some("0.8665"));
    let latin19 = read("latin-19-13-sts-28");
    assert_eq!(value(&latin19, "n", ""), Some("20577"));
    assert_eq!(value(&latin19, "pr1", ""), Some("0.6571"));
    assert_eq!(value(&read("tri-8-sts-31"), "fail", "10"), Some("0.1853"));
    let gd23 = read("gd-2-23-sts-22");
    assert_eq!(
        (value(&gd23, "v", ""), value(&gd23, "n", ""), value(&gd23, "k", "")),
        (Some("859"), Some("2070"), Some("45"))
    );
}
