//! End-to-end checks of the command-line contract.

use assert_cmd::Command;
use predicates::prelude::*;

fn iset() -> Command {
    Command::cargo_bin("iset").expect("binary builds")
}

fn write_graph(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn sample_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(&dir, "p3.el", "3 2\n0 1\n1 2\n");
    iset()
        .args(["sample", "--epsilon", "0.1", "--seed", "42"])
        .arg("--graph")
        .arg(&p3)
        .assert()
        .success()
        .stdout(predicate::str::contains("set: {"))
        .stdout(predicate::str::contains("failed: "));
}

#[test]
fn sample_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(&dir, "p3.el", "3 2\n0 1\n1 2\n");
    let run = |seed: &str| {
        iset()
            .args(["sample", "--seed", seed])
            .arg("--graph")
            .arg(&p3)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("7"), run("7"));
}

#[test]
fn unknown_flag_exits_one() {
    iset()
        .args(["sample", "--no-such-flag"])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("--help").or(predicate::str::contains("Usage")));
}

#[test]
fn missing_graph_exits_one() {
    iset().args(["sample"]).assert().code(1).stderr(
        predicate::str::contains("--graph"),
    );
}

#[test]
fn bad_backend_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(&dir, "p3.el", "3 2\n0 1\n1 2\n");
    iset()
        .args(["sample", "--backend", "bogus"])
        .arg("--graph")
        .arg(&p3)
        .assert()
        .code(1);
}

#[test]
fn verify_pm_bound_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    iset()
        .args([
            "verify-pm-bound",
            "--trials",
            "200",
            "--sizes",
            "8,12",
            "--densities",
            "0.5,1.0",
            "--seed",
            "7",
        ])
        .arg("--out")
        .arg(&out)
        .assert()
        .code(0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("verdict: CONFIRMED"));
    assert!(text.contains("runtime_seconds:"));
}

#[test]
fn verify_distances_stdout_report() {
    iset()
        .args(["verify-distances", "--trials", "200", "--seed", "3"])
        .assert()
        .code(0)
        .stdout(predicate::str::contains("experiment: distance-lemma"))
        .stdout(predicate::str::contains("verdict: CONFIRMED"));
}

#[test]
fn measure_uniformity_exit_code_tracks_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let k2 = write_graph(&dir, "k2.el", "2 1\n0 1\n");
    iset()
        .args([
            "measure-uniformity",
            "--epsilon",
            "0.1",
            "--samples",
            "2000",
            "--seed",
            "5",
        ])
        .arg("--graph")
        .arg(&k2)
        .assert()
        .code(0)
        .stdout(predicate::str::contains("measure.tv_to_uniform"));
}

#[test]
fn count_edgeless_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(&dir, "e4.el", "4 0\n");
    iset()
        .args(["count", "--eps0", "0.3"])
        .arg("--graph")
        .arg(&g)
        .assert()
        .success()
        .stdout(predicate::str::contains("estimate: 16"));
}

#[test]
fn seed_env_var_is_default() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(&dir, "p3.el", "3 2\n0 1\n1 2\n");
    let with_env = iset()
        .env("ISET_SEED", "11")
        .args(["sample"])
        .arg("--graph")
        .arg(&p3)
        .output()
        .unwrap()
        .stdout;
    let with_flag = iset()
        .args(["sample", "--seed", "11"])
        .arg("--graph")
        .arg(&p3)
        .output()
        .unwrap()
        .stdout;
    assert_eq!(with_env, with_flag);
}

#[test]
fn malformed_graph_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_graph(&dir, "bad.el", "2 1\n0 5\n");
    iset()
        .args(["sample"])
        .arg("--graph")
        .arg(&bad)
        .assert()
        .code(1)
        .stderr(predicate::str::contains("error:"));
}
