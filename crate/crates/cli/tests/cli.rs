mod common;

use std::path::Path;
use std::process::{Command, Output};

use pucci_lab_cli::report::RunReport;
use serde_json::Value;

fn pucci_lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pucci-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("PUCCI_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn without_timing(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn bessel_oracle_zero() {
    let j = common::first_bessel_zero();
    assert!((j - 2.404_825_557_695_773).abs() < 1e-13);
    assert!(common::bessel_j0(j).abs() < 1e-14);
}

#[test]
fn radial_defaults_pass_and_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = pucci_lab(&["radial"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = RunReport::read(&dir.path().join("radial.report.json")).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.parameters["dims"], serde_json::json!([2]));
    assert!(dir.path().join("radial_profile.csv").exists());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"alphas": [0.0, 1.0], "dims": [2]}"#).unwrap();
    let out = pucci_lab(
        &["radial", "--config", cfg.to_str().unwrap(), "--set", "dims=[3]", "--set", "k=2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = RunReport::read(&dir.path().join("radial.report.json")).unwrap();
    assert_eq!(report.parameters["dims"], serde_json::json!([3]));
    assert_eq!(report.parameters["k"], serde_json::json!(2.0));
    assert_eq!(report.checks.len(), 2);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // An impossible tolerance turns the check red without any error.
    let out = pucci_lab(&["radial", "--set", "tol=0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(dir.path().join("radial.report.json").exists());
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["radial", "--set", "alpha=-1"][..],
        &["eigen", "--set", "a=2"][..],
        &["overdetermined", "--set", "neumann=[0.5]"][..],
        &["sector", "--set", "dims=[4]"][..],
        &["radial", "--set", "no_such_key=1"][..],
        &["radial", "--config", "/nonexistent.json"][..],
    ] {
        let out = pucci_lab(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_pucci-lab"))
        .args(["radial", "--out", "x"])
        .env("PUCCI_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Unknown commands are rejected by the argument parser.
    assert_ne!(pucci_lab(&["nothing"], dir.path()).status.code(), Some(0));
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["properties", "--set", "trials=50", "--set", "comparison_trials=10"];
    assert_eq!(pucci_lab(&args, a.path()).status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_pucci-lab"))
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("PUCCI_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let name = "properties.report.json";
    assert_eq!(without_timing(&a.path().join(name)), without_timing(&b.path().join(name)));
    for csv in ["properties.csv", "small_domain.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(csv)).unwrap(),
            std::fs::read(b.path().join(csv)).unwrap()
        );
    }
}

#[test]
fn verdicts_do_not_depend_on_seed() {
    for seed in ["1", "99"] {
        let dir = tempfile::tempdir().unwrap();
        let out = pucci_lab(
            &["properties", "--set", &format!("seed={seed}"), "--set", "comparison_trials=10"],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "seed {seed}");
    }
}

#[test]
fn injected_nonmonotone_stencil_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = pucci_lab(
        &["properties", "--set", "inject_nonmonotone=true", "--set", "comparison_trials=5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_aggregates_previous_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pucci_lab(&["radial"], dir.path()).status.code(), Some(0));
    assert_eq!(pucci_lab(&["overdetermined"], dir.path()).status.code(), Some(0));
    let out = pucci_lab(&["report"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = RunReport::read(&dir.path().join("report.report.json")).unwrap();
    assert_eq!(report.checks.len(), 2);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("command,check,value,relation,threshold,pass"));
    assert!(summary.contains("overdetermined,Laplacian c = -R/N"));
}

#[test]
fn coarse_serrin_and_sector_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = pucci_lab(&["serrin", "--set", "h=0.04", "--set", "directions=4"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = pucci_lab(&["sector", "--set", "ratios=[1.0,0.9]", "--set", "epsilons=[0.0]"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = RunReport::read(&dir.path().join("sector.report.json")).unwrap();
    assert_eq!(report.results["normalization"], "sup");
    let row = &report.results["rows"][0];
    for key in ["a", "A", "epsilon", "delta", "N", "lambda_bar", "gamma", "iterations"] {
        assert!(row.get(key).is_some(), "{key}");
    }
    assert!(dir.path().join("sector_field.csv").exists());
}
