use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qnn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnn"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("QNN_OUT_DIR")
        .output()
        .unwrap()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let out = Command::new(env!("CARGO_BIN_EXE_qnn")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_succeeds() {
    let out = Command::new(env!("CARGO_BIN_EXE_qnn"))
        .arg("--help")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnn(&["train-teleport", "--learning-rate", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = qnn(&["train-teleport", "--eta", "fast"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn momentum_outside_unit_interval_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnn(&["train-teleport", "--momentum", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("momentum"));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn verify_oracle_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnn(&["verify-oracle"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(dir.path());
    assert_eq!(s["status"], "passed");
    assert_eq!(s["results"]["haar"]["samples"], 1000);
    assert!(s["results"]["haar"]["max"].as_f64().unwrap() <= 1e-9);
    assert!(dir.path().join("network.json").exists());
}

#[test]
fn teleport_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = [
        "train-teleport",
        "--seed",
        "7",
        "--max-iterations",
        "400",
        "--eval-samples",
        "50",
    ];
    assert_eq!(qnn(&args, a.path()).status.code(), Some(0));
    assert_eq!(qnn(&args, b.path()).status.code(), Some(0));
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    assert_eq!(qnn(&threaded, c.path()).status.code(), Some(0));
    for name in ["trace.csv", "network.json", "summary.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
        assert_eq!(
            read(a.path(), name),
            read(c.path(), name),
            "{name} with 2 threads"
        );
    }
    let trace = String::from_utf8(read(a.path(), "trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,cost\n0,"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "eta = 0.1\nseed = 3\nmax_iterations = 5\neval_samples = 4\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let file_only = dir.path().join("file");
    assert_eq!(
        qnn(&["train-teleport", "--config", cfg], &file_only)
            .status
            .code(),
        Some(0)
    );
    let s = summary(&file_only);
    assert_eq!(s["config"]["eta"], 0.1);
    assert_eq!(s["seed"], 3);

    let flagged = dir.path().join("flag");
    assert_eq!(
        qnn(
            &["train-teleport", "--config", cfg, "--eta", "0.05"],
            &flagged
        )
        .status
        .code(),
        Some(0)
    );
    let s = summary(&flagged);
    assert_eq!(s["config"]["eta"], 0.05);
    assert_eq!(s["config"]["max_iterations"], 5);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "learning_rate = 0.1\n").unwrap();
    let out = qnn(
        &["train-teleport", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_qnn"))
        .args(["classical-check", "--random-sets", "3"])
        .env("QNN_OUT_DIR", &target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("summary.json").exists());
    let rows = fs::read_to_string(target.join("truth_tables.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 5 * 4);
}

#[test]
fn landscape_writes_full_grid_and_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnn(&["landscape", "--grid", "101x101"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let grid = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let mut lines = grid.lines();
    assert_eq!(lines.next(), Some("theta,phi,cost"));
    let costs: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(costs.len(), 10201);
    assert!(costs.iter().cloned().fold(f64::INFINITY, f64::min) <= 1e-6);
    let path = fs::read_to_string(dir.path().join("path.csv")).unwrap();
    assert!(path.starts_with("step,theta,phi,cost\n0,2.5,2.5,"));
    let last: f64 = path
        .lines()
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(last < 1e-4);
}

#[test]
fn divergence_exits_with_status_two_and_keeps_the_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnn(
        &["train-teleport", "--eta", "1e308", "--max-iterations", "20"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("trace.csv").exists());
    assert_eq!(summary(dir.path())["status"], "diverged");
}

#[test]
fn autoencoder_reports_bottleneck_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnn(
        &[
            "train-autoencoder",
            "--inputs",
            "orthogonal",
            "--diagonality-penalty",
            "--max-iterations",
            "30",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let s = summary(dir.path());
    assert_eq!(s["config"]["diagonality_penalty"], true);
    assert_eq!(s["results"]["bottleneck"].as_array().unwrap().len(), 2);
    assert_eq!(s["label_map"].as_array().unwrap().len(), 6);
}
