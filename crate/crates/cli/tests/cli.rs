use std::path::Path;
use std::process::{Command, Output};

use cge_cli::report::strip_timestamp;
use cge_cli::{run, Cell, RunError, RunReport, Scenario, ScenarioConfig};

fn cge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn defaults(s: Scenario) -> ScenarioConfig {
    ScenarioConfig::resolve(s, None, &[], None).unwrap()
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn vacuum_scaling_matches_golden_file() {
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/vacuum_scaling.csv"),
    )
    .unwrap();
    let fresh = run(&defaults(Scenario::VacuumScaling)).unwrap().to_csv();
    let (a, b) = (parse_csv(&golden), parse_csv(&fresh));
    assert_eq!(a[0], b[0]);
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b).skip(1) {
        for (x, y) in ra.iter().zip(rb) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn csv_and_json_carry_identical_data() {
    let report = run(&defaults(Scenario::CgPurity)).unwrap();
    let csv = parse_csv(&report.to_csv());
    let back: RunReport = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back, report);
    assert_eq!(csv[0], back.columns);
    for (text_row, row) in csv.iter().skip(1).zip(&back.rows) {
        for (text, cell) in text_row.iter().zip(row) {
            let parsed: f64 = text.parse().unwrap();
            assert_eq!(parsed.to_bits(), cell.as_f64().unwrap().to_bits());
        }
    }
}

#[test]
fn sweep_rows_follow_the_configured_order() {
    let config =
        ScenarioConfig::resolve(Scenario::NwConvergence, None, &["mass_eps=16, 0.5, 4, 1".into()], None)
            .unwrap();
    let report = run(&config).unwrap();
    let order: Vec<f64> = report.rows.iter().map(|r| r[0].as_f64().unwrap()).collect();
    assert_eq!(order, vec![16.0, 0.5, 4.0, 1.0]);
    // Not monotone in the given order, so the trend verdict must fail.
    assert!(!report.passed);
}

#[test]
fn empty_sweep_gives_header_only_csv() {
    let config =
        ScenarioConfig::resolve(Scenario::VacuumScaling, None, &["intervals=".into()], None).unwrap();
    let report = run(&config).unwrap();
    assert_eq!(report.to_csv(), "interval,log_chord,entropy_nats\n");
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["rows"], serde_json::json!([]));
    assert!(!report.passed);
}

#[test]
fn singlet_row_reports_ln2() {
    let report = run(&defaults(Scenario::Singlet)).unwrap();
    assert!(report.passed);
    let row = &report.rows[0];
    assert!((row[1].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(row[4], Cell::Bool(true));
}

#[test]
fn module_preconditions_name_the_parameter() {
    let config =
        ScenarioConfig::resolve(Scenario::Commutators, None, &["epsilon=1".into()], None).unwrap();
    let err = run(&config).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("eps"), "{err}");
}

#[test]
fn numerical_failures_map_to_exit_three() {
    let e = RunError::Core(cge_core::Error::QuadratureNotConverged {
        estimate: 1.0,
        tolerance: 1e-12,
    });
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(cge(&["singlet"]).status.code(), Some(0));
    assert_eq!(cge(&["localization-fidelity"]).status.code(), Some(1));
    let unknown = cge(&["singlet", "--set", "colour=red"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("colour"));
    assert_eq!(cge(&["no-such-scenario"]).status.code(), Some(2));
    assert_eq!(cge(&["nw-convergence", "--set", "mass_eps=500"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file_and_bits_converts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("singlet.cfg");
    std::fs::write(&cfg, "modes = 3\nsite_j = 2\n").unwrap();
    let out = dir.path().join("out.json");
    let status = cge(&[
        "singlet",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "site_j=1",
        "--bits",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.parameters["modes"], serde_json::json!(3));
    assert_eq!(report.parameters["site_j"], serde_json::json!(1));
    assert_eq!(report.columns[1], "entropy_bits");
    assert!((report.rows[0][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = cge(&["bounds", "--seed", "77", "--format", "json", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        texts.push(strip_timestamp(&std::fs::read_to_string(path).unwrap()).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let other = ScenarioConfig::resolve(Scenario::Bounds, None, &[], Some(78)).unwrap();
    let other = strip_timestamp(&run(&other).unwrap().to_json()).unwrap();
    assert_ne!(texts[0], other);
}
