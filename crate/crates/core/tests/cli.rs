use std::process::{Command, Output};

use serde_json::Value;
use sphere_paradox::audit::AuditReport;
use sphere_paradox::degree::DegreeReport;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphere-paradox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn twin_audit_succeeds_with_strictness_certificate() {
    let o = bin(&[
        "audit-twin",
        "--rule",
        "dictator",
        "--winner",
        "1",
        "--k",
        "3",
        "--dim",
        "1",
        "--seed",
        "42",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: AuditReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.pair, Some([2, 3]));
    let cert = report.certificate.unwrap();
    assert!(cert.verified);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "proved_with_witness");
    assert_eq!(v["certificate"]["kind"], "strictness");
    assert!(v["certificate"]["d_after"]["deg"].as_f64().unwrap() > 179.999);
}

#[test]
fn degree_of_partial_rule_is_a_structured_negative() {
    let o = bin(&[
        "degree",
        "--rule",
        "normalized_mean",
        "--k",
        "3",
        "--dim",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let report: DegreeReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!report.additivity_ok);
    assert_eq!(report.failures.len(), 3);
}

#[test]
fn small_electorate_is_an_error() {
    let o = bin(&["audit-twin", "--rule", "dictator", "--k", "2", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k >= 3"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bin(&["audit-twin", "--k", "3"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        bin(&["degree", "--rule", "dictator", "--k", "3", "--format", "xml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bin(&["degree", "--rule", "median", "--k", "3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &[
            "audit-twin",
            "--rule",
            "rotated_dictator",
            "--angle",
            "1.0",
            "--k",
            "4",
            "--dim",
            "2",
            "--seed",
            "5",
        ][..],
        &[
            "witness-noshow",
            "--family",
            "antagonistic_mean",
            "--k",
            "2",
            "--dim",
            "2",
            "--seed",
            "9",
        ][..],
        &[
            "nau-scan",
            "--rule",
            "dictator",
            "--k",
            "3",
            "--dim",
            "2",
            "--net-size",
            "300",
        ][..],
    ] {
        let (a, b) = (bin(args), bin(args));
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_round_trip_is_a_fixed_point() {
    let o = bin(&[
        "audit-noshow",
        "--family",
        "constant",
        "--angle",
        "0.7",
        "--k",
        "2",
        "--dim",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let report: AuditReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, text);
    let reparsed: AuditReport = serde_json::from_str(&again).unwrap();
    assert_eq!(reparsed, report);
}

#[test]
fn csv_and_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degrees.csv");
    let o = bin(&[
        "degree",
        "--rule",
        "dictator",
        "--k",
        "3",
        "--dim",
        "2",
        "--level",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["rule", "alpha_or_pair", "degree", "additivity_ok"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[0][2], "1");
    assert_eq!(&rows[5][1], "2-3");
    assert_eq!(&rows[5][2], "0");
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        1,
        "no temp files left behind"
    );
}

#[test]
fn unwritable_output_is_an_error() {
    let o = bin(&[
        "degree",
        "--rule",
        "dictator",
        "--k",
        "3",
        "--out",
        "/nonexistent-dir/report.json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir"));
}

#[test]
fn nau_scan_flags_the_constant_pair() {
    let o = bin(&["nau-scan", "--rule", "dictator", "--k", "3", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let maps = v["maps"].as_array().unwrap();
    assert_eq!(maps.len(), 4);
    let certified: Vec<bool> = maps
        .iter()
        .map(|m| m["scan"]["certified"].as_bool().unwrap())
        .collect();
    assert_eq!(certified, [true, true, true, false]);
}

#[test]
fn witness_search_finds_twin_violation() {
    let o = bin(&[
        "witness-twin",
        "--rule",
        "normalized_mean",
        "--k",
        "3",
        "--dim",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("twin,weak"));
}
