use std::fs;
use std::path::Path;
use std::process::Command;

fn run(dir: &Path, config: &str, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_infostab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn exact_family_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(
        dir.path(),
        r#"{"schema_version": 1, "job": {"kind": "certify", "certify": {"theorem": "fundamental-open",
            "f": {"kind": "power-family", "a": 2, "b": 1, "alpha": 0.5}, "alpha": 0.5, "resolution": 256}}}"#,
        &["--jobs", "2"],
    );
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["certificates"][0]["satisfied"], true);
    assert!(dir.path().join("out/summary.csv").exists());
}

#[test]
fn alpha_one_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(
        dir.path(),
        r#"{"schema_version": 1, "job": {"kind": "certify", "certify": {"theorem": "fundamental-open",
            "f": {"kind": "shannon-s"}, "alpha": 1, "resolution": 64}}}"#,
        &[],
    );
    assert_eq!(code, 2);
    assert!(err.contains("alpha"), "{err}");
}

#[test]
fn empty_alpha_grid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(
        dir.path(),
        r#"{"schema_version": 1, "job": {"kind": "sweep", "alphas": [], "target": {"of": "constants"}}}"#,
        &[],
    );
    assert_eq!(code, 2);
    assert!(err.contains("alphas"), "{err}");
}

#[test]
fn unknown_equation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(
        dir.path(),
        r#"{"schema_version": 1, "job": {"kind": "residual", "equation": {"equation": "no-such"},
            "grid": {"kind": "unit", "resolution": 4}, "functions": {"f": {"kind": "log2"}}}}"#,
        &[],
    );
    assert_eq!(code, 2);
    assert!(err.contains("no-such"), "{err}");
}

#[test]
fn violation_exits_one_and_dumps_defects() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(
        dir.path(),
        r#"{"schema_version": 1, "job": {"kind": "residual", "equation": {"equation": "cauchy-additive"},
            "grid": {"kind": "unit-pairs", "resolution": 8}, "functions": {"f": {"kind": "power-law", "c": 1, "alpha": 2}}, "target": 1e-9}}"#,
        &["--dump-defects"],
    );
    assert_eq!(code, 1);
    assert!(dir.path().join("out/defects.csv").exists());
}

#[test]
fn constants_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(
        dir.path(),
        r#"{"schema_version": 1, "job": {"kind": "sweep", "alphas": [0.25, 0.5, 2, 3, 5], "target": {"of": "constants"}}}"#,
        &[],
    );
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("alpha,regime,K,T,relation_gap"));
}
