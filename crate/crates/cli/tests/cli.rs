use std::path::Path;
use std::process::{Command, Output};

fn eqmps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqmps"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn compute_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5},
            "mesh": {"dim": 3, "refinements": 1}, "invariants": ["ddks"]}"#,
    );
    let out = eqmps(&["--threads", "2", "compute", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["results"]["ddks"]["value"]["value"], 1);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5},
            "mesh": {"dim": 3, "refinements": 0}, "group": ["T"], "invariants": ["pump"]}"#,
    );
    let out = eqmps(&["compute", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("C2x"));
    assert_eq!(
        eqmps(&["compute", "/nonexistent/config.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(eqmps(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 1},
            "mesh": {"dim": 3, "refinements": 0}, "invariants": ["ddks"]}"#,
    );
    let out = eqmps(&["compute", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("simplex"));
}

#[test]
fn mesh_and_ingest() {
    let out = eqmps(&["mesh", "--dim", "3", "--group", "T,C2x"]);
    assert_eq!(out.status.code(), Some(0));
    let mesh: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(mesh["vertices"].as_array().unwrap().len(), 8);
    assert_eq!(mesh["group_labels"].as_array().unwrap().len(), 4);
    assert_eq!(
        eqmps(&["mesh", "--dim", "2", "--group", "T"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.json");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"schema_version": 1, "model": {{"kind": "dimer_spin_chain", "spin": 0.5}},
                "mesh": {{"dim": 3, "refinements": 1}}, "output": {{"family": {fam:?}}}}}"#
        ),
    );
    assert_eq!(eqmps(&["compute", &cfg]).status.code(), Some(0));
    let fam = fam.to_string_lossy();
    let out = eqmps(&["ingest", &fam, "--refinements", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["ddks"]["value"], 1);
    assert_eq!(
        eqmps(&["ingest", &fam, "--refinements", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn selftest_passes() {
    let out = eqmps(&["selftest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout)
        .lines()
        .all(|l| l.starts_with("PASS")));
}
