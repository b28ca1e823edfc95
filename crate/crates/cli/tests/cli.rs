use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sqgt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqgt"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Workspace with the worked-example thresholds and the step-3 thresholds.
fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("th.json"), "[0,2,5,6,10,13,15,16,18,21]").unwrap();
    std::fs::write(dir.path().join("th3.json"), "[0,3,6,9,12,15,18,21,24,27,30,33,36,39,42,45]").unwrap();
    dir
}

/// The identity code with multipliers 3, 6, 12 and d = 2.
fn identity_code(dir: &Path) {
    let out = sqgt(
        dir,
        &["code", "build", "--base", "identity:2", "--values", "3 6 12", "--kind", "sqlo-s", "--h", "3", "--thresholds", "th3.json", "--d", "2", "--out", "code"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn greedy_sequence_example() {
    let dir = workspace();
    let out = sqgt(dir.path(), &["seq", "gen", "--kind", "sqlo-s", "--h", "3", "--K", "3", "--thresholds", "th.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "2 5 11\n");
}

#[test]
fn decode_example_prints_one_based_columns() {
    let dir = workspace();
    identity_code(dir.path());
    let out = sqgt(dir.path(), &["decode", "--code", "code.json", "--y", "3 0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1 3\n");
}

#[test]
fn built_code_verifies() {
    let dir = workspace();
    identity_code(dir.path());
    let out = sqgt(dir.path(), &["code", "verify", "--l", "1", "--u", "2", "--e", "0", "code.txt"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "separable\n");
}

#[test]
fn duplicated_columns_fail_verification() {
    let dir = workspace();
    std::fs::write(dir.path().join("dup.txt"), "2 3 4\n1 1 0\n0 0 1\n").unwrap();
    let out = sqgt(dir.path(), &["code", "verify", "--u", "1", "--thresholds", "th3.json", "dup.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn syndrome_then_decode_round_trips() {
    let dir = workspace();
    identity_code(dir.path());
    let y = sqgt(dir.path(), &["syndrome", "--code", "code.json", "--defectives", "2 5"]);
    assert!(y.status.success());
    let line = stdout(&y);
    let out = sqgt(dir.path(), &["decode", "--code", "code.json", "--y", line.trim()]);
    assert_eq!(stdout(&out), "2 5\n");
}

#[test]
fn decoding_failure_exits_3() {
    let dir = workspace();
    identity_code(dir.path());
    // Bin 14 holds no sum of at most two multipliers.
    let out = sqgt(dir.path(), &["decode", "--code", "code.json", "--y", "14 0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_and_domain_errors() {
    let dir = workspace();
    assert_eq!(sqgt(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(sqgt(dir.path(), &["seq", "gen", "--kind", "sqlo-s"]).status.code(), Some(2));
    let headroom = sqgt(
        dir.path(),
        &["code", "build", "--base", "identity:2", "--values", "3 6 12", "--kind", "sqlo-s", "--h", "3", "--thresholds", "th3.json", "--d", "4", "--out", "c"],
    );
    assert_eq!(headroom.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&headroom.stderr).contains("headroom"));
    let bad_seq = sqgt(dir.path(), &["seq", "check", "--thresholds", "th3.json", "--values", "4 5 6", "--kind", "sqlo-s", "--h", "2"]);
    assert_eq!(bad_seq.status.code(), Some(1));
}

#[test]
fn simulate_is_deterministic_and_perfect() {
    let dir = workspace();
    identity_code(dir.path());
    let args = ["simulate", "--code", "code.json", "--json", "--workers", "2"];
    let a = sqgt(dir.path(), &args);
    let b = sqgt(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let summary: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(summary["cases"], 21);
    assert_eq!(summary["failures"], 0);
}

#[test]
fn random_simulation_is_seeded() {
    let dir = workspace();
    identity_code(dir.path());
    let run = |seed: &str| {
        stdout(&sqgt(
            dir.path(),
            &["simulate", "--code", "code.json", "--json", "--injected", "1", "--policy", "random", "--samples", "4", "--seed", seed],
        ))
    };
    assert_eq!(run("5"), run("5"));
}

#[test]
fn base_generation_and_verification() {
    let dir = workspace();
    assert!(sqgt(dir.path(), &["base", "gen", "ks:5:2:2", "--out", "ks5.txt"]).status.success());
    assert_eq!(sqgt(dir.path(), &["base", "verify", "--d", "2", "--e", "1", "ks5.txt"]).status.code(), Some(0));
    assert_eq!(sqgt(dir.path(), &["base", "verify", "--d", "3", "--e", "1", "ks5.txt"]).status.code(), Some(1));

    let out = sqgt(
        dir.path(),
        &["code", "build", "--base", "file:ks5.txt:2:1", "--values", "2 5", "--kind", "sqlo-s", "--h", "2", "--thresholds", "th.json", "--d", "2", "--out", "ks"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // One changed row is corrected.
    let y = stdout(&sqgt(dir.path(), &["syndrome", "--code", "ks.json", "--defectives", "3 40"]));
    let noisy = stdout(&sqgt(dir.path(), &["inject", "--code", "ks.json", "--y", y.trim(), "--errors", "0:7"]));
    assert_ne!(y, noisy);
    assert_eq!(stdout(&sqgt(dir.path(), &["decode", "--code", "ks.json", "--y", noisy.trim()])), "3 40\n");
}

#[test]
fn sequence_file_feeds_code_build() {
    let dir = workspace();
    let gen = sqgt(dir.path(), &["seq", "gen", "--kind", "sqlo-s", "--h", "3", "--K", "3", "--thresholds", "th.json", "--out", "seq.json"]);
    assert!(gen.status.success());
    let out = sqgt(
        dir.path(),
        &["code", "build", "--base", "identity:2", "--sequence", "seq.json", "--d", "3", "--mode", "permissive", "--out", "p"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let y = stdout(&sqgt(dir.path(), &["syndrome", "--code", "p.json", "--defectives", "1 5"]));
    assert_eq!(stdout(&sqgt(dir.path(), &["decode", "--code", "p.json", "--y", y.trim()])), "1 5\n");
}

#[test]
fn report_counting_bound() {
    let dir = workspace();
    std::fs::write(dir.path().join("q4.json"), "[0,1,2,3,4]").unwrap();
    let out = sqgt(dir.path(), &["report", "--n", "1000", "--d", "10", "--K", "1", "--h", "1", "--q", "2", "--thresholds", "q4.json", "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["counting_bound"].as_f64().unwrap() - 33.2).abs() < 0.1);
}

#[test]
fn bench_emits_csv() {
    let dir = workspace();
    let out = sqgt(dir.path(), &["bench", "--ks", "3,5", "--calls", "100"]);
    let text = stdout(&out);
    assert!(text.starts_with("decoder,k,nanos_per_call,table_size\n"));
    assert_eq!(text.lines().count(), 7);
}
