//! The `smstab` binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use smstab::cli::exit;
use smstab::witness::CertificateJson;
use tempfile::TempDir;

fn smstab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smstab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixtures() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "loop_three_cycle.mask", "**0\n00*\n*00\n");
    write(dir.path(), "nested_three.mask", "**0\n*0*\n*00\n");
    write(dir.path(), "nested_three.json", r#"{"n": 3, "free": [[1,1],[1,2],[2,1],[2,3],[3,1]]}"#);
    write(dir.path(), "sinkless_components.mask", "0**00\n00*0*\n000*0\n0*00*\n0000*\n");
    write(dir.path(), "broken.mask", "**\n*\n");
    dir
}

#[test]
fn analyze_json_for_unstable_example() {
    let dir = fixtures();
    let o = smstab(dir.path(), &["analyze", "loop_three_cycle.mask", "--format", "json"]);
    assert_eq!(o.status.code(), Some(exit::UNSTABLE));
    assert_eq!(stdout(&o).trim(), r#"{"tag":"ProvedUnstable","reason":"NoHamiltonianK","k":2}"#);
}

#[test]
fn analyze_text_and_exit_codes() {
    let dir = fixtures();
    let o = smstab(dir.path(), &["analyze", "nested_three.mask"]);
    assert_eq!(o.status.code(), Some(exit::STABLE));
    let text = stdout(&o);
    assert!(text.contains("verdict: ProvedStable"), "{text}");
    assert!(text.contains("ordering: (1,2,3)"), "{text}");

    let o = smstab(dir.path(), &["analyze", "sinkless_components.mask", "--format", "json"]);
    assert_eq!(o.status.code(), Some(exit::UNSTABLE));
    assert!(stdout(&o).contains(r#""violating":[1,2,3,4]"#));
}

#[test]
fn witness_for_stable_example() {
    let dir = fixtures();
    for file in ["nested_three.mask", "nested_three.json"] {
        let o = smstab(dir.path(), &["witness", file, "--format", "json"]);
        assert_eq!(o.status.code(), Some(exit::STABLE));
        let cert: CertificateJson = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(cert.ordering, vec![1, 2, 3]);
        assert!(cert.hurwitz);
        assert!(cert.abscissa < -1e-9);
    }
    let o = smstab(dir.path(), &["witness", "loop_three_cycle.mask"]);
    assert_eq!(o.status.code(), Some(exit::SYNTHESIS));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nested chain"));
}

#[test]
fn output_is_reproducible_under_a_seed() {
    let dir = fixtures();
    let a = smstab(dir.path(), &["analyze", "nested_three.mask", "--seed", "7"]);
    let b = smstab(dir.path(), &["analyze", "nested_three.mask", "--seed", "7", "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
    let o = smstab(dir.path(), &["oracle", "nested_three.mask", "--seed", "3", "--restarts", "8"]);
    let p = smstab(dir.path(), &["oracle", "nested_three.mask", "--seed", "3", "--restarts", "8", "--sequential"]);
    assert_eq!(o.status.code(), Some(exit::STABLE));
    assert_eq!(o.stdout, p.stdout);
}

#[test]
fn oracle_reports_nothing_on_unstable_pattern() {
    let dir = fixtures();
    let o = smstab(
        dir.path(),
        &["oracle", "loop_three_cycle.mask", "--restarts", "4", "--steps", "50", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(exit::UNKNOWN));
    assert!(stdout(&o).starts_with(r#"{"found":false"#));
}

#[test]
fn identities_pass() {
    let dir = fixtures();
    let o = smstab(dir.path(), &["identities", "--trials", "100", "--n", "4"]);
    assert_eq!(o.status.code(), Some(exit::STABLE));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5, "{text}");
    assert!(text.lines().all(|l| l.contains("pass") && l.ends_with("failures 0")), "{text}");
}

#[test]
fn canon_prints_orbit() {
    let dir = fixtures();
    let o = smstab(dir.path(), &["canon", "loop_three_cycle.mask", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["orbit_size"], 6);
}

#[test]
fn atlas_round_trip() {
    let dir = fixtures();
    let o = smstab(dir.path(), &["atlas", "enumerate", "-n", "2", "--out", "a2.jsonl"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("6 stable"));
    let o = smstab(dir.path(), &["atlas", "validate", "-n", "2", "--atlas", "a2.jsonl"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches(" pass ").count(), 5);
    let o = smstab(dir.path(), &["atlas", "query", "a2.jsonl", "--verdict", "stable", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let records: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let total: u64 = records.iter().map(|r| r["orbit_size"].as_u64().unwrap()).sum();
    assert_eq!(total, 6);
}

#[test]
fn report_goes_to_out_file() {
    let dir = fixtures();
    let o = smstab(dir.path(), &["analyze", "loop_three_cycle.mask", "--format", "json", "--out", "v.json"]);
    assert_eq!(o.status.code(), Some(exit::UNSTABLE));
    assert!(o.stdout.is_empty());
    let saved = std::fs::read_to_string(dir.path().join("v.json")).unwrap();
    assert!(saved.contains("NoHamiltonianK"));
}

#[test]
fn errors_have_distinct_codes() {
    let dir = fixtures();
    assert_eq!(smstab(dir.path(), &["analyze", "missing.mask"]).status.code(), Some(exit::IO));
    assert_eq!(smstab(dir.path(), &["analyze", "broken.mask"]).status.code(), Some(exit::PARSE));
    assert_eq!(
        smstab(dir.path(), &["analyze", "sinkless_components.mask", "--frobnicate"]).status.code(),
        Some(exit::USAGE)
    );
    assert_eq!(smstab(dir.path(), &["atlas", "enumerate", "-n", "6"]).status.code(), Some(exit::CAPABILITY));
    assert_eq!(
        smstab(dir.path(), &["analyze", "sinkless_components.mask", "--restarts", "0"]).status.code(),
        Some(exit::CONFIG)
    );
}
