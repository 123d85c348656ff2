use std::path::{Path, PathBuf};
use std::process::Command;

use monopose::runner::OUTPUT_FILES;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monopose"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

#[test]
fn validate_accepts_bundled_scenarios() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    assert!(files.len() >= 5);
    let out = bin().arg("validate").args(&files).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn validate_reports_every_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[object]\nwidth_m = -1.0\n[noise]\ndetection_dropout = 2.0\n[gate]\nchi2_quantile = 1.5\n",
    )
    .unwrap();
    let out = bin().arg("validate").arg(&bad).output().unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for key in ["width_m", "detection_dropout", "chi2_quantile"] {
        assert!(text.contains(key), "{key} missing from {text}");
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("typo.toml");
    std::fs::write(&bad, "[trajectory]\nduration = 3.0\n").unwrap();
    let out = bin().arg("validate").arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("duration"));
}

#[test]
fn run_writes_outputs_and_seed_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--seed", "42", "--out"])
        .arg(tmp.path())
        .arg(scenario("static-cube.toml"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in OUTPUT_FILES {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    let manifest = std::fs::read_to_string(tmp.path().join("manifest.toml")).unwrap();
    assert!(manifest.lines().any(|l| l == "seed = 42"));
    let summary = std::fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("metric,mean,median\nt_err_m,"));
}

#[test]
fn several_configs_get_their_own_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--out"])
        .arg(tmp.path())
        .arg(scenario("static-cube.toml"))
        .arg(scenario("occlusion.toml"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("static-cube/estimates.csv").is_file());
    assert!(tmp.path().join("occlusion/estimates.csv").is_file());
}

#[test]
fn manifest_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = bin()
        .args(["run", "--out"])
        .arg(&a)
        .arg(scenario("occlusion.toml"))
        .status()
        .unwrap();
    assert!(first.success());
    let again = bin()
        .args(["run", "--out"])
        .arg(&b)
        .arg(a.join("manifest.toml"))
        .status()
        .unwrap();
    assert!(again.success());
    for f in OUTPUT_FILES {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn missing_file_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--out"])
        .arg(tmp.path())
        .arg(tmp.path().join("nope.toml"))
        .output()
        .unwrap();
    assert!(!out.status.success());
}
