use std::path::Path;

use eqmps::gcomplex::{build_sphere_complex, MeshLabel};
use eqmps::mps::{FamilyFile, TensorRecord, FAMILY_SCHEMA_VERSION};
use eqmps::pipeline::{run, selftest, Invariant, ReportValue, RunConfig};
use eqmps::Error;

fn config(body: &str) -> RunConfig {
    RunConfig::from_json(body).unwrap()
}

fn integer(r: &ReportValue) -> i64 {
    match r {
        ReportValue::Integer(q) => q.value,
        other => panic!("not an integer result: {other:?}"),
    }
}

#[test]
fn dimer_chain_ddks_and_relations() {
    let cfg = config(
        r#"{"schema_version": 1,
            "model": {"kind": "dimer_spin_chain", "spin": 0.5},
            "mesh": {"dim": 3, "refinements": 2},
            "group": ["T", "C2x", "C2y"],
            "invariants": ["ddks", "cocycles", "spt", "pump", "pump_fixed_point", "gamma2",
                           "gamma2_fixed_point", "ddks_parity_t", "ddks_mod4_z2z2", "ddks_parity_z2z2"]}"#,
    );
    let report = run(&cfg).unwrap();
    assert_eq!(report.mesh.counts[3], 1024);
    let ddks = &report.results["ddks"];
    assert_eq!(integer(ddks), 1);
    for key in [
        "pump_fixed_point",
        "gamma2_fixed_point",
        "ddks_parity_t",
        "ddks_mod4_z2z2",
        "ddks_parity_z2z2",
    ] {
        match &report.results[key] {
            ReportValue::Relation(r) => assert!(r.residual < 1e-6, "{key}: {r:?}"),
            other => panic!("{key}: {other:?}"),
        }
    }
    match &report.results["spt"] {
        ReportValue::Spt(m) => {
            assert_eq!(m["P+"].mu_rp["T"].k, 1);
            assert_eq!(m["P-"].mu_rp["T"].k, 0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn rotation_relations_use_the_generated_elements() {
    // C2z is generated as a product of Q4z with itself
    let cfg = config(
        r#"{"schema_version": 1,
            "model": {"kind": "dimer_spin_chain", "spin": 1},
            "mesh": {"dim": 3, "refinements": 1},
            "group": ["C2zT", "Q4z"],
            "invariants": ["ddks", "ddks_parity_berry", "ddks_mod2_pump", "ddks_mod4_pump"]}"#,
    );
    let report = run(&cfg).unwrap();
    assert_eq!(integer(&report.results["ddks"]), 2);
    match &report.results["ddks_mod4_pump"] {
        ReportValue::Relation(r) => assert!((r.direct - std::f64::consts::PI).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn pure_state_models() {
    let report = run(&config(
        r#"{"schema_version": 1, "model": {"kind": "spin_field", "spin": 1},
            "mesh": {"dim": 2, "refinements": 2}, "invariants": ["chern"]}"#,
    ))
    .unwrap();
    assert_eq!(integer(&report.results["chern"]), 2);
    let report = run(&config(
        r#"{"schema_version": 1, "model": {"kind": "purestate_2x2"},
            "mesh": {"dim": 2, "refinements": 1}, "invariants": ["xi_s2"]}"#,
    ))
    .unwrap();
    match &report.results["xi_s2"] {
        ReportValue::Quantized(q) => assert_eq!(q.k, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_request_reports_metadata_only() {
    let report = run(&config(
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5},
            "mesh": {"dim": 3, "refinements": 0}}"#,
    ))
    .unwrap();
    assert!(report.results.is_empty());
    assert_eq!(report.mesh.n_vertices, 8);
    assert_eq!(report.group, vec!["e"]);
}

#[test]
fn invalid_requests_are_config_errors() {
    let cases = [
        // wrong mesh dimension for the model
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5}, "mesh": {"dim": 2, "refinements": 0}}"#,
        // pump needs C2x
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5}, "mesh": {"dim": 3, "refinements": 0},
            "group": ["T"], "invariants": ["pump"]}"#,
        // pure invariant on an MPS model
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5}, "mesh": {"dim": 3, "refinements": 0},
            "invariants": ["chern"]}"#,
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.7}, "mesh": {"dim": 3, "refinements": 0}}"#,
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5}, "mesh": {"dim": 3, "refinements": 0},
            "group": ["C3"]}"#,
        r#"{"schema_version": 2, "model": {"kind": "dimer_spin_chain", "spin": 0.5}, "mesh": {"dim": 3, "refinements": 0}}"#,
        r#"{"schema_version": 1, "model": {"kind": "dimer_spin_chain", "spin": 0.5}, "mesh": {"dim": 3, "refinements": 0},
            "tolerances": {"bogus": 1.0}}"#,
        r#"{"schema_version": 1, "model": {"kind": "spin_field", "spin": 0.5}, "mesh": {"dim": 2, "refinements": 0},
            "group": ["T"]}"#,
    ];
    for body in cases {
        let err = RunConfig::from_json(body).unwrap_err();
        assert!(err.is_config_error(), "{body}: {err}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let body = |name: &str| {
        format!(
            r#"{{"schema_version": 1, "model": {{"kind": "dimer_spin_chain", "spin": 0.5}},
                "mesh": {{"dim": 3, "refinements": 1}}, "group": ["T", "C2x", "C2y"],
                "invariants": ["ddks", "spt", "gamma2", "cocycles"],
                "output": {{"report": {:?}}}}}"#,
            dir.path().join(name)
        )
    };
    run(&config(&body("a.json"))).unwrap();
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    threads.install(|| run(&config(&body("b.json")))).unwrap();
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn failing_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    // spin 1 at refinement 0 exceeds the flux guard
    let cfg = config(&format!(
        r#"{{"schema_version": 1, "model": {{"kind": "dimer_spin_chain", "spin": 1}},
            "mesh": {{"dim": 3, "refinements": 0}}, "invariants": ["ddks"], "output": {{"report": {report:?}}}}}"#
    ));
    let err = run(&cfg).unwrap_err();
    assert!(!err.is_config_error());
    assert!(!report.exists());
}

fn ingest_config(path: &Path, extra: &str) -> RunConfig {
    config(&format!(
        r#"{{"schema_version": 1, "model": {{"kind": "ingest", "path": {path:?}{extra}}},
            "mesh": {{"dim": 3, "refinements": 1}}, "invariants": ["ddks"]}}"#
    ))
}

#[test]
fn export_then_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.json");
    let csv = dir.path().join("csv");
    let original = run(&config(&format!(
        r#"{{"schema_version": 1, "model": {{"kind": "dimer_spin_chain", "spin": 0.5}},
            "mesh": {{"dim": 3, "refinements": 1}}, "group": ["T", "C2x", "C2y"],
            "invariants": ["ddks", "gamma2", "pump", "ddks_mod4_z2z2"],
            "output": {{"family": {fam:?}, "csv_dir": {csv:?}}}}}"#
    )))
    .unwrap();
    assert!(csv.join("a02.csv").exists());
    let mut cfg = ingest_config(&fam, r#", "spin": 0.5"#);
    cfg.group = vec!["T".into(), "C2x".into(), "C2y".into()];
    cfg.invariants = vec![
        Invariant::Ddks,
        Invariant::Gamma2,
        Invariant::Pump,
        Invariant::DdksMod4Z2z2,
    ];
    let again = run(&cfg).unwrap();
    for (key, a) in &original.results {
        let b = &again.results[key];
        let (x, y) = match (a, b) {
            (ReportValue::Integer(a), ReportValue::Integer(b)) => (a.raw, b.raw),
            (ReportValue::Gamma2(a), ReportValue::Gamma2(b)) => (a.value, b.value),
            (ReportValue::Angle(a), ReportValue::Angle(b)) => (*a, *b),
            (ReportValue::Relation(a), ReportValue::Relation(b)) => (a.formula, b.formula),
            other => panic!("{other:?}"),
        };
        assert!((x - y).abs() < 1e-12, "{key}: {x} vs {y}");
    }
}

fn record(n: usize, d: usize, f: impl Fn(usize, usize, usize) -> f64) -> TensorRecord {
    TensorRecord {
        n,
        d,
        tensors: (0..n)
            .map(|i| {
                (0..d)
                    .map(|a| (0..d).map(|b| [f(i, a, b), 0.0]).collect())
                    .collect()
            })
            .collect(),
        lambda: vec![1.0 / (d as f64).sqrt(); d],
    }
}

fn write_file(path: &Path, vertices: Vec<TensorRecord>) {
    let mesh = MeshLabel {
        kind: "sphere".into(),
        dim: 3,
        refinements: Some(1),
    };
    let file = FamilyFile {
        schema_version: FAMILY_SCHEMA_VERSION,
        mesh,
        vertices,
    };
    std::fs::write(path, serde_json::to_string(&file).unwrap()).unwrap();
}

#[test]
fn product_family_has_zero_ddks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let n = build_sphere_complex(3, 1).unwrap().n_vertices();
    write_file(
        &path,
        (0..n)
            .map(|_| record(2, 1, |i, _, _| if i == 0 { 0.6 } else { 0.8 }))
            .collect(),
    );
    let report = run(&ingest_config(&path, "")).unwrap();
    assert_eq!(integer(&report.results["ddks"]), 0);
}

#[test]
fn non_injective_tensor_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let n = build_sphere_complex(3, 1).unwrap().n_vertices();
    let good = |_: usize| record(2, 1, |i, _, _| if i == 0 { 0.6 } else { 0.8 });
    let mut vertices: Vec<TensorRecord> = (0..n).map(good).collect();
    // two decoupled copies of a product state
    vertices[5] = record(2, 2, |i, a, b| if a == b { [0.6, 0.8][i] } else { 0.0 });
    write_file(&path, vertices);
    match run(&ingest_config(&path, "")).unwrap_err() {
        Error::CanonicalizationFailed { vertex, source } => {
            assert_eq!(vertex, 5);
            assert!(matches!(*source, Error::NotInjective(_)));
        }
        other => panic!("{other}"),
    }
}

#[test]
fn selftest_passes() {
    for line in selftest() {
        assert!(line.passed, "{}: {}", line.name, line.detail);
    }
}
