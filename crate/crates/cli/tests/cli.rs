use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qkz_cli::Report;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qkz(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qkz"));
    cmd.args(args).env_remove("QKZ_CACHE_DIR");
    if let Some(c) = cache {
        cmd.env("QKZ_CACHE_DIR", c);
    }
    cmd.output().unwrap()
}

fn run_fixture(name: &str, out: &Path, extra: &[&str], cache: Option<&Path>) -> Output {
    let cfg = fixture(name);
    let mut args = vec!["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    qkz(&args, cache)
}

fn read_report(p: &Path) -> Report {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn full_pipeline_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run_fixture("rational-n2.json", &out, &[], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_report(&out);
    assert!(r.all_pass() && r.failed == 0);
    assert_eq!(r.environment.d, 4);
    for name in ["qybe(1, 1/2)", "crossing-forms-agree", "normalization", "theta-squared", "flatness#2(1, 3)"] {
        assert!(r.checks.iter().any(|c| c.name == name), "missing {name}");
    }
    let summary = std::fs::read_to_string(out.with_extension("txt")).unwrap();
    assert!(summary.contains(&format!("{} passed, 0 failed", r.passed)));
}

#[test]
fn elliptic_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_fixture("elliptic.json", &dir.path().join("r.json"), &[], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("elliptic family out of scope"));
}

#[test]
fn malformed_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(run_fixture("unknown-field.json", &out, &[], None).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(qkz(&["--config", missing.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(run_fixture("rational-n2.json", &out, &["--jobs", "0"], None).status.code(), Some(2));
    assert_eq!(run_fixture("rational-n2.json", &out, &["--suite", "bogus"], None).status.code(), Some(2));
}

#[test]
fn unwritable_report_is_internal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing-dir/r.json");
    let o = run_fixture("perturbed-r.json", &out, &["--suite", "crossing"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fault_fixture_names_identity_and_grade() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run_fixture("perturbed-r.json", &out, &[], None);
    assert_eq!(o.status.code(), Some(1));
    let r = read_report(&out);
    let bad = r.checks.iter().find(|c| c.name.starts_with("qybe(")).unwrap();
    assert_eq!((bad.status.as_str(), bad.grade, bad.pass), ("fails-at-grade-2", Some(2), false));
    assert!(String::from_utf8_lossy(&o.stdout).contains("fails-at-grade-2"));
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run_fixture("rational-n2.json", &out, &["--suite", "crossing", "--d-override", "2", "--jobs", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(&out);
    assert_eq!((r.environment.d, r.family.d, r.checks.len()), (2, 2, 3));
}

#[test]
fn cache_cold_warm_and_tampered() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    let args = ["--suite", "normalize"];
    assert_eq!(run_fixture("rational-n2.json", &a, &args, Some(&cache)).status.code(), Some(0));
    let entry = cache.join("rational-N2-D4.json");
    let stored = std::fs::read_to_string(&entry).unwrap();
    assert_eq!(run_fixture("rational-n2.json", &b, &args, Some(&cache)).status.code(), Some(0));
    assert_eq!(read_report(&a).without_timing().to_json(), read_report(&b).without_timing().to_json());

    let mut v: serde_json::Value = serde_json::from_str(&stored).unwrap();
    v["payload"]["f0"][1] = "(3) / (1)".into();
    std::fs::write(&entry, v.to_string()).unwrap();
    let o = run_fixture("rational-n2.json", &c, &args, Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("corrupt"));
    assert_eq!(std::fs::read_to_string(&entry).unwrap(), stored);
    assert_eq!(read_report(&a).without_timing(), read_report(&c).without_timing());
}
