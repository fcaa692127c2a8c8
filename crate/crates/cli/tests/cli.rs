use std::process::{Command, Output};

use clap::Parser;
use gks_cli::{run, Cli, RunError};
use serde_json::Value;

fn gks(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gks"));
    cmd.args(args).env_remove("GKS_SEED");
    if let Some(s) = seed_env {
        cmd.env("GKS_SEED", s);
    }
    cmd.output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn parse(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("gks").chain(args.iter().copied())).unwrap()
}

#[test]
fn report_schema() {
    let out = gks(&["clifford", "--n", "8", "--json"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], "gks-report/1");
    assert_eq!(v["command"], "clifford");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["pass"], true);
    for c in v["checks"].as_array().unwrap() {
        for key in ["name", "max_residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "check without {key}: {c}");
        }
    }
    assert_eq!(v["details"]["half_spinor_ranks"], serde_json::json!([8, 8]));
}

#[test]
fn seed_comes_from_environment_unless_given() {
    let env = json_of(&gks(&["s3-example", "--json", "--samples", "5"], Some("42")));
    assert_eq!(env["seed"], 42);
    let flag = json_of(&gks(&["s3-example", "--json", "--samples", "5", "--seed", "3"], Some("42")));
    assert_eq!(flag["seed"], 3);
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("gks-cli-test-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = gks(&["classify", "--n", "7", "--lambda", "0.5", "--mu", "-1.5", "--p", "3", "--q", "4", "--json", "--out", p], None);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, out.stdout);
    let v: Value = serde_json::from_slice(&written).unwrap();
    assert_eq!(v["details"]["admissible"], true);
}

#[test]
fn human_output_is_a_table() {
    let out = gks(&["dim15", "--trials", "10"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("totally_geodesic_failure"));
    assert!(text.contains("details:"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["clifford", "--n", "0"][..],
        &["killing", "--sphere", "3", "--constant", "0.3"],
        &["eta", "--sphere", "7"],
        &["classify", "--n", "7", "--lambda", "0.5"],
        &["classify", "--n", "7", "--lambda", "0.5", "--mu", "-1.5", "--p", "3", "--q", "3"],
        &["clifford", "--n", "4", "--tol", "no_such_check=1"],
        &["clifford", "--n", "4", "--samples", "0"],
        &["frobnicate"],
    ] {
        let out = gks(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let out = gks(&["s3-example", "--samples", "5", "--json", "--tol", "gks_equation=1e-300"], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "gks_equation").unwrap();
    assert_eq!(check["tolerance"], 1e-300);
    assert_eq!(check["pass"], false);
    assert_eq!(v["pass"], false);
}

#[test]
fn inadmissible_verdict_is_still_a_pass() {
    let out = gks(&["classify", "--n", "15", "--lambda", "0.5", "--mu", "-1.5", "--p", "7", "--q", "8", "--json"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["details"]["admissible"], false);
    assert_eq!(v["details"]["reason"], "dim15-cross-product-obstruction");
}

#[test]
fn in_process_runs_are_deterministic() {
    let cli = parse(&["killing", "--sphere", "7", "--constant", "-0.5", "--samples", "8", "--seed", "11"]);
    let a = run(&cli).unwrap();
    let b = run(&cli).unwrap();
    assert!(a.pass);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn wrong_endomorphism_fails_verification() {
    let cli = parse(&["killing", "--sphere", "3", "--constant", "0.5", "--against", "-0.5", "--samples", "5"]);
    let r = run(&cli).unwrap();
    assert!(!r.pass);
    assert!(!r.check("gks_equation").unwrap().pass);
}

#[test]
fn grid_classification_lists_admissible_data() {
    let r = run(&parse(&["classify", "--n", "3"])).unwrap();
    let details = r.details.unwrap();
    assert_eq!(details["admissible"].as_array().unwrap().len(), 4);
    assert!(matches!(run(&parse(&["eta", "--sphere", "9"])), Err(RunError::Usage(_))));
}
