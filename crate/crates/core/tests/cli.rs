//! Black-box tests of the command-line interface: exit codes, the report
//! schema, and configuration validation.

use holoconvex::report::Report;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holoconvex"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn parse_report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn schema_keys_present(report: &Value) {
    for key in [
        "command",
        "domain",
        "mapping",
        "seed",
        "samples",
        "verdict",
        "margins",
        "witness",
        "timing_ms",
    ] {
        assert!(report.get(key).is_some(), "missing key {key} in {report}");
    }
}

#[test]
fn rho_command_reports_the_minkowski_functional() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [2.0, 2.0]}, "point": [[0.6, 0.0], [0.0, 0.8]]}"#,
    );
    let out = run(&["rho", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&out);
    schema_keys_present(&report);
    assert_eq!(report["command"], "rho");
    assert!((report["rho"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(report["residual"].as_f64().unwrap().abs() < 1e-10);

    // typed round trip
    let _typed: Report = serde_json::from_value(report).unwrap();
}

#[test]
fn rho_command_accepts_zero_and_small_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(
        dir.path(),
        "zero.json",
        r#"{"domain": {"p": [2.0, 2.0]}, "point": [[0.0, 0.0], [0.0, 0.0]]}"#,
    );
    let out = run(&["rho", "--config", &zero]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(parse_report(&out)["rho"].as_f64().unwrap(), 0.0);

    // the geometry accepts any p > 1; only criterion commands refuse p < 2
    let small = write(
        dir.path(),
        "small.json",
        r#"{"domain": {"p": [1.5, 3.0]}, "point": [[0.3, 0.0], [0.1, 0.2]]}"#,
    );
    let out = run(&["rho", "--config", &small]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_identity_passes_system_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [2.0, 2.0]}, "mapping": {"family": "identity"}}"#,
    );
    let out = run(&["check", "1", "--config", &cfg, "--samples", "300"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = parse_report(&out);
    schema_keys_present(&report);
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn check_quadratic_family_margins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [3.0, 3.0]},
            "mapping": {"family": "theorem4_quadratic",
                        "a1": [0.05, 0.0], "a2": [0.05, 0.0],
                        "a1_prime": [0.05, 0.0], "a2_prime": [0.05, 0.0]}}"#,
    );
    let out = run(&["check", "4", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&out);
    let margins = report["margins"].as_array().unwrap();
    assert_eq!(margins.len(), 2);
    for entry in margins {
        // both inequality left sides are 0.46
        assert!((entry["margin"].as_f64().unwrap() - 0.54).abs() < 1e-12);
    }

    let cfg = write(
        dir.path(),
        "fail.json",
        r#"{"domain": {"p": [3.0, 3.0]},
            "mapping": {"family": "theorem4_quadratic",
                        "a1": [0.5, 0.0], "a2": [0.0, 0.0],
                        "a1_prime": [0.0, 0.0], "a2_prime": [0.0, 0.0]}}"#,
    );
    let out = run(&["check", "4", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(parse_report(&out)["verdict"], "fail");
}

#[test]
fn criterion_commands_refuse_small_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [1.5, 2.0]}, "mapping": {"family": "identity"}}"#,
    );
    for args in [
        vec!["check", "1", "--config", cfg.as_str()],
        vec!["scan", "--config", cfg.as_str(), "--samples", "10"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(
            stderr.contains("p_j >= 2"),
            "stderr must cite the exponent hypothesis, got: {stderr}"
        );
    }
}

#[test]
fn check_system_four_needs_equal_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [2.0, 3.0]},
            "mapping": {"family": "theorem4_quadratic",
                        "a1": [0.0, 0.0], "a2": [0.0, 0.0],
                        "a1_prime": [0.0, 0.0], "a2_prime": [0.0, 0.0]}}"#,
    );
    let out = run(&["check", "4", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_example_exit_codes_follow_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let template = |a: f64| {
        format!(
            r#"{{"domain": {{"p": [2.0, 3.0, 3.0]}},
                "mapping": {{"family": "example1",
                            "a": [[{a}, 0.0], [{a}, 0.0], [{a}, 0.0]],
                            "lambda": [0.5, 0.0], "k": 2}}}}"#
        )
    };
    let good = write(dir.path(), "good.json", &template(0.03));
    let out = run(&["validate-example", "1", "--config", &good]);
    assert_eq!(out.status.code(), Some(0));

    // 0.05 exceeds the bound (1 - 0.5)/((2+1)^2 + 4) ~ 0.03846
    let bad = write(dir.path(), "bad.json", &template(0.05));
    let out = run(&["validate-example", "1", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let report = parse_report(&out);
    let first = &report["margins"].as_array().unwrap()[0];
    assert!((first["margin"].as_f64().unwrap() - (0.5 / 13.0 - 0.05)).abs() < 1e-12);
}

#[test]
fn scan_identity_is_nonnegative() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [2.0, 2.0]}, "mapping": {"family": "identity"}}"#,
    );
    let out = run(&["scan", "--config", &cfg, "--samples", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&out);
    schema_keys_present(&report);
    assert_eq!(report["verdict"], "no violation found");
    assert!(report["min_j"].as_f64().unwrap() >= -1e-12);
    assert!(report["witness"]["j_value"].as_f64().is_some());
}

#[test]
fn falsify_negative_control_reports_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [2.0, 2.0]},
            "mapping": {"family": "custom_triangular",
                        "components": [[{"coeff": [3.0, 0.0], "exponents": [2, 0]}], []]}}"#,
    );
    let out = run(&[
        "falsify",
        "--config",
        &cfg,
        "--restarts",
        "10",
        "--rho-floor",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = parse_report(&out);
    schema_keys_present(&report);
    assert_eq!(report["verdict"], "violation");
    assert!(report["witness"]["j_value"].as_f64().unwrap() < 0.0);
    assert!(report["witness"]["residual"].as_f64().unwrap().abs() <= 1e-10);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();

    let out = run(&["rho", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(out.status.code(), Some(2));

    let malformed = write(dir.path(), "broken.json", "{");
    let out = run(&["rho", "--config", &malformed]);
    assert_eq!(out.status.code(), Some(2));

    let no_mapping = write(dir.path(), "nomap.json", r#"{"domain": {"p": [2.0, 2.0]}}"#);
    let out = run(&["scan", "--config", &no_mapping, "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin().arg("not-a-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"domain": {"p": [2.0, 2.0]}, "point": [[0.1, 0.0], [0.0, 0.0]]}"#,
    );
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "rho",
        "--config",
        &cfg,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["command"], "rho");
}
