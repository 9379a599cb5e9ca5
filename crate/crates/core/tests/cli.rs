use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subelliptic::cli::config_schema;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn subell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subell")).args(args).output().unwrap()
}

fn run_config(path: &Path, extra: &[&str]) -> Output {
    let src = std::fs::read_to_string(path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&src).unwrap();
    let sub = v["task"]["kind"].as_str().unwrap();
    let mut args = vec![sub, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    subell(&args)
}

#[test]
fn report_embeds_the_resolved_config() {
    let out = subell(&["describe", "--geometry", r#"{"kind": "Grushin", "params": {"n": 2, "k": 1, "gamma": 2}}"#]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["payload"]["Q"], 5.0);
    assert_eq!(report["config"]["geometry"]["kind"], "Grushin");
    assert_eq!(report["task"], "describe");
}

#[test]
fn timing_is_opt_in() {
    let out = subell(&["describe", "--geometry", r#"{"kind": "HType7"}"#, "--timing"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["wall_clock_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn out_path_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lyap.csv");
    let cfg = root().join("configs/lyapunov_log_rho.json");
    let out = run_config(&cfg, &["--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("verify-lyapunov: Holds"), "{stderr}");
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("rung,r_lo,r_hi,evaluated,excluded,failures,min_margin\n"), "{csv}");
}

#[test]
fn config_errors_name_the_json_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"geometry": {"kind": "HType7"}, "task": {"kind": "describe"}, "sampling": {"rungz": 3}}"#)
        .unwrap();
    let out = subell(&["describe", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("/sampling/rungz"), "{stderr}");
}

#[test]
fn schema_subcommand_prints_the_schema() {
    let out = subell(&["schema"]);
    assert_eq!(out.stdout, config_schema().as_bytes());
}
