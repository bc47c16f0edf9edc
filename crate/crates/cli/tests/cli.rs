use std::path::Path;
use std::process::{Command, Output};

fn gflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gflab")).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn grunsky_run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"t": [0.0, 0.5, 0.9], "random_tails": 3}"#).unwrap();
    let out_dir = dir.path().join("run");
    let out = gflab(&["grunsky", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("grunsky: PASS"));
    let csv = read(&out_dir, "results.csv");
    assert_eq!(csv.lines().next(), Some("t,N,kappa_N,oracle,verdict"));
    assert_eq!(csv.lines().count(), 4);
    let manifest: serde_json::Value = serde_json::from_str(&read(&out_dir, "manifest.json")).unwrap();
    assert_eq!(manifest["experiment"], "grunsky");
    assert_eq!(manifest["seed"], 3);
    let report: serde_json::Value = serde_json::from_str(&read(&out_dir, "report.json")).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"instances": 4}"#).unwrap();
    let mut texts = vec![];
    for k in 0..2 {
        let o = dir.path().join(format!("run{k}"));
        let out = gflab(&["lemma1", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap(), "--seed", "11"]);
        assert!(matches!(out.status.code(), Some(0 | 1)));
        texts.push(["results.csv", "report.json", "manifest.json"].map(|f| read(&o, f)));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(gflab(&["nonsense"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"bogus_field": 1}"#).unwrap();
    let out = gflab(&["grunsky", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_field"));
    let missing = dir.path().join("absent.json");
    assert_eq!(gflab(&["approx", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn gate_violation_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"r": {"poles": [{"a": [0, 0], "c": [0.3, 0]}]}}"#).unwrap();
    let out = gflab(&["thm4", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
