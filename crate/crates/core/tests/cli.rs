//! End-to-end checks of the `mbn` binary: exit codes, the state-file
//! roundtrip, and determinism of the seeded commands.

use std::path::Path;
use std::process::{Command, Output};

fn mbn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn export_bell_roundtrips_through_measure() {
    let dir = tempdir();
    let out = mbn(&["catalog", "export", "bell", "--out", "bell.json"], dir.path());
    assert!(out.status.success());
    let report = json_stdout(&mbn(&["measure", "bell.json"], dir.path()));
    assert!((report["mbn"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((report["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn maximally_mixed_measures_zero() {
    let dir = tempdir();
    mbn(&["catalog", "export", "max_mixed_3x3", "--out", "mm.json"], dir.path());
    let report = json_stdout(&mbn(&["measure", "mm.json"], dir.path()));
    assert_eq!(report["mbn"].as_f64().unwrap(), 0.0);
    assert_eq!(report["negativity"].as_f64().unwrap(), 0.0);
    assert!(report["cm_violation"].as_f64().unwrap() <= 0.0);
    assert!(report["gcm_violation"].as_f64().unwrap() <= 0.0);
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempdir();
    std::fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    let out = mbn(&["measure", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_catalog_label_exits_2() {
    let dir = tempdir();
    let out = mbn(&["catalog", "export", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_domain_parameter_exits_1() {
    let dir = tempdir();
    let out = mbn(&["example1", "--alpha", "9.0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_list_names_the_experiment_states() {
    let dir = tempdir();
    let out = mbn(&["catalog", "list"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    for label in [
        "horodecki_qutrit",
        "toth_4qubit",
        "bloch_diagonal_bd",
        "me2",
        "me3",
        "me4",
    ] {
        assert!(text.lines().any(|l| l == label), "missing {label}");
    }
}

#[test]
fn horodecki_separable_region_has_zero_negativity() {
    let dir = tempdir();
    mbn(
        &["catalog", "export", "horodecki_qutrit", "--alpha", "2.5", "--out", "h.json"],
        dir.path(),
    );
    let report = json_stdout(&mbn(&["measure", "h.json"], dir.path()));
    assert!(report["negativity"].as_f64().unwrap() < 1e-12);
}

#[test]
fn tomo_is_deterministic_per_seed() {
    let dir = tempdir();
    let args = [
        "tomo", "--k", "2", "--n", "50", "--trials", "20", "--seed", "3",
        "--trials-out", "t.csv", "--hist-prefix", "h",
    ];
    let first = json_stdout(&mbn(&args, dir.path()));
    let csv1 = std::fs::read(dir.path().join("t.csv")).unwrap();
    let second = json_stdout(&mbn(&args, dir.path()));
    let csv2 = std::fs::read(dir.path().join("t.csv")).unwrap();
    assert_eq!(first, second);
    assert_eq!(csv1, csv2);
    assert!(dir.path().join("h_mbn.csv").exists());
    assert!(dir.path().join("h_negativity.csv").exists());
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}
