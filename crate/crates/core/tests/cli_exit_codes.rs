use std::fs;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_ranforge");

fn status(args: &[&str]) -> Option<i32> {
    Command::new(BIN).args(args).output().expect("binary runs").status.code()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(status(&["frobnicate"]), Some(1));
    assert_eq!(status(&["compile"]), Some(1));
    assert_eq!(status(&["--jobs", "0", "channel-table"]), Some(1));
}

#[test]
fn help_exits_0() {
    assert_eq!(status(&["--help"]), Some(0));
}

#[test]
fn invalid_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let yaml = dir.path().join("bad.yaml");
    fs::write(&yaml, "environment: urban_embb\nsimulation_time_s: -5\nseed: 1\nsites: [{x: 0, y: 0}]\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(status(&["compile", yaml.to_str().unwrap(), "-o", out.to_str().unwrap()]), Some(2));
}

#[test]
fn missing_run_dir_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let out = dir.path().join("out");
    assert_eq!(status(&["export", missing.to_str().unwrap(), "-o", out.to_str().unwrap()]), Some(3));
}

#[test]
fn dump_deployment_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let yaml = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/rural_embb.yaml");
    let out = Command::new(BIN)
        .args(["compile", yaml, "-o", dir.path().join("c").to_str().unwrap(), "--dump-deployment"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let written = fs::read_to_string(dir.path().join("c/deployment.csv")).unwrap();
    assert_eq!(stdout, written);
}
