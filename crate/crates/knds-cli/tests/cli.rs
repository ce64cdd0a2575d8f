//! End-to-end tests of the `knds` binary: output contents, exit codes,
//! schema rejection, and byte-level determinism.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn knds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knds"))
        .args(args)
        .output()
        .expect("spawn knds")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

fn assert_close(actual: f64, expected: f64, rel: f64, what: &str) {
    let scale = expected.abs().max(1e-300);
    assert!(
        (actual - expected).abs() <= rel * scale,
        "{what}: {actual} vs {expected}"
    );
}

const CANONICAL: [&str; 8] = [
    "--mass", "1", "--spin", "0.1", "--charge", "0.1", "--lambda", "0.05",
];

#[test]
fn forward_reports_canonical_horizons() {
    let out = knds(&[&["forward"], &CANONICAL[..], &["--k", "1,2,3"]].concat());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);

    assert_eq!(doc["schema_version"], "1");
    assert_close(
        doc["horizons"]["event"].as_f64().unwrap(),
        2.158770116802367,
        1e-12,
        "event radius",
    );
    assert_close(
        doc["horizons"]["cosmological"].as_f64().unwrap(),
        6.431164159830318,
        1e-12,
        "cosmological radius",
    );
    assert_close(
        doc["horizons"]["cauchy"].as_f64().unwrap(),
        0.01005049774977094,
        1e-10,
        "cauchy radius",
    );
    assert_eq!(doc["regime"]["inverse_applicable"], true);
    assert_eq!(doc["traces"]["provenance"], "closed-form");

    // k gamma_k is constant over k.
    let g1 = doc["traces"]["gammak_event"]["1"].as_f64().unwrap();
    let g3 = doc["traces"]["gammak_event"]["3"].as_f64().unwrap();
    assert_close(3.0 * g3, g1, 1e-12, "k gamma_k invariance");

    // gamma_1 is the homothety eta^2 (1 - xi) of the same report.
    let eta = doc["event_geometry"]["eta"].as_f64().unwrap();
    let xi = doc["event_geometry"]["xi"].as_f64().unwrap();
    assert_close(g1, eta * eta * (1.0 - xi), 1e-12, "gamma_1 vs homothety");
}

#[test]
fn forward_output_is_deterministic() {
    let args = [&["forward"], &CANONICAL[..], &["--k", "1,2"]].concat();
    let first = knds(&args);
    let second = knds(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "two runs differ byte for byte");
}

#[test]
fn forward_rejects_horizonless_parameters_with_report() {
    let out = knds(&[
        "forward", "--mass", "1", "--spin", "0.999", "--charge", "0.9", "--lambda", "0.3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // The report still lands on stdout so the caller can see which
    // precondition failed.
    let doc = stdout_json(&out);
    assert_eq!(doc["regime"]["horizons_found"], false);
    assert_eq!(doc["regime"]["inverse_applicable"], false);
    assert!(!doc["regime"]["notes"].as_array().unwrap().is_empty());
}

#[test]
fn forward_flags_zero_spin_as_not_invertible() {
    let out = knds(&[
        "forward", "--mass", "1", "--spin", "0", "--charge", "0.2", "--lambda", "0.05",
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["regime"]["inverse_applicable"], false);
    assert_eq!(
        doc["traces"]["note"],
        "inverse not applicable: spin is zero"
    );
    let notes = doc["regime"]["notes"].as_array().unwrap();
    assert!(notes
        .iter()
        .any(|n| n.as_str().unwrap().contains("requires a > 0")));
}

#[test]
fn malformed_flags_are_usage_errors() {
    assert_eq!(knds(&["--bogus"]).status.code(), Some(1));
    assert_eq!(knds(&["forward", "--mass", "1"]).status.code(), Some(1));
    assert_eq!(
        knds(&["forward", "--mass", "x", "--spin", "0", "--charge", "0", "--lambda", "0.1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(knds(&["--help"]).status.code(), Some(0));
}

#[test]
fn spectrum_rejects_undersized_grids() {
    let out = knds(&["spectrum", "--profile", "round", "--grid", "32"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below the minimum 64"));
}

#[test]
fn spectrum_round_profile_matches_sphere_ladder() {
    let out = knds(&[
        "spectrum", "--profile", "round", "--k", "0", "--grid", "128", "--count", "5",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let mode = &doc["modes"][0];
    assert_eq!(mode["k"], 0);
    let eigs = mode["eigenvalues"].as_array().unwrap();
    // Zero mode excluded: the ladder starts at m (m + 1) with m = 1.
    for (i, eig) in eigs.iter().enumerate() {
        let m = (i + 1) as f64;
        assert_close(eig.as_f64().unwrap(), m * (m + 1.0), 1e-3, "sphere eigenvalue");
    }
}

#[test]
fn spectrum_csv_is_well_formed() {
    let out = knds(&[
        "spectrum", "--profile", "round", "--k", "0,1", "--grid", "128", "--count", "4",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,j,lambda,error_estimate"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4, "row {line:?}");
        let _: i32 = fields[0].parse().unwrap();
        let _: usize = fields[1].parse().unwrap();
        let lambda: f64 = fields[2].parse().unwrap();
        let err: f64 = fields[3].parse().unwrap();
        assert!(lambda > 0.0 && err >= 0.0);
        rows += 1;
    }
    assert_eq!(rows, 8, "two modes, four eigenvalues each");
}

#[test]
fn spectrum_trace_estimate_agrees_with_closed_form() {
    let out = knds(&[
        "spectrum", "--xi", "0.2", "--beta-sq", "0.15", "--k", "1", "--grid", "256",
        "--count", "30",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let mode = &doc["modes"][0];
    let rel = mode["trace"]["relative_difference_from_closed_form"]
        .as_f64()
        .unwrap();
    assert!(rel.abs() < 5e-3, "spectral trace off by {rel}");
}

#[test]
fn spectrum_requires_one_profile_source() {
    let out = knds(&["spectrum", "--profile", "round", "--xi", "0.1", "--beta-sq", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = knds(&["spectrum", "--xi", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = knds(&["spectrum"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inverse_recovers_parameters_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traces.json");
    std::fs::File::create(&path)
        .unwrap()
        .write_all(
            br#"{
  "schema_version": "1",
  "gamma0_event": 4.663362538213925,
  "gamma1_event": 4.669510165504654,
  "gamma0_cosmo": 41.3609079097837,
  "gamma1_cosmo": 41.36297862091585
}"#,
        )
        .unwrap();
    let out = knds(&["inverse", "--traces", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_close(doc["parameters"]["mass"].as_f64().unwrap(), 1.0, 1e-9, "mass");
    assert_close(doc["parameters"]["spin"].as_f64().unwrap(), 0.1, 1e-9, "spin");
    assert_close(doc["parameters"]["charge"].as_f64().unwrap(), 0.1, 1e-7, "charge");
    assert_close(
        doc["parameters"]["cosmological_constant"].as_f64().unwrap(),
        0.05,
        1e-9,
        "lambda",
    );
}

#[test]
fn inverse_rejects_schema_violations() {
    let dir = tempfile::tempdir().unwrap();

    let missing = dir.path().join("missing.json");
    std::fs::write(
        &missing,
        r#"{"schema_version": "1", "gamma0_event": 4.0, "gamma1_event": 4.1, "gamma1_cosmo": 41.4}"#,
    )
    .unwrap();
    let out = knds(&["inverse", "--traces", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma0_cosmo"));

    let unknown = dir.path().join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"schema_version": "1", "gamma0_event": 4.0, "gamma1_event": 4.1,
            "gamma0_cosmo": 41.0, "gamma1_cosmo": 41.4, "gamma2_event": 2.0}"#,
    )
    .unwrap();
    let out = knds(&["inverse", "--traces", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    let version = dir.path().join("version.json");
    std::fs::write(
        &version,
        r#"{"schema_version": "2", "gamma0_event": 4.0, "gamma1_event": 4.1,
            "gamma0_cosmo": 41.0, "gamma1_cosmo": 41.4}"#,
    )
    .unwrap();
    let out = knds(&["inverse", "--traces", version.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = knds(&["inverse", "--traces", "/nonexistent/traces.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inverse_names_the_failing_stage() {
    // Equal gamma_1 means round horizons; the h target degenerates.
    let out = knds(&[
        "inverse", "--gamma0-event", "4.0", "--gamma1-event", "5.0", "--gamma0-cosmo",
        "40.0", "--gamma1-cosmo", "5.0",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invert_h/denominator"));
}

#[test]
fn inverse_checks_optional_modes_against_gamma1() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, gamma2: f64| {
        let path = dir.path().join(name);
        std::fs::write(
            &path,
            format!(
                r#"{{
  "schema_version": "1",
  "gamma0_event": 4.663362538213925,
  "gamma1_event": 4.669510165504654,
  "gamma0_cosmo": 41.3609079097837,
  "gamma1_cosmo": 41.36297862091585,
  "optional_gammak": {{ "event": {{ "2": {gamma2} }} }}
}}"#
            ),
        )
        .unwrap();
        path
    };

    // 2 gamma_2 = gamma_1 holds: the extra mode is accepted.
    let good = write("good.json", 4.669510165504654 / 2.0);
    let out = knds(&["inverse", "--traces", good.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_close(
        stdout_json(&out)["parameters"]["mass"].as_f64().unwrap(),
        1.0,
        1e-9,
        "mass",
    );

    // A percent-level contradiction in the redundant mode is flagged.
    let bad = write("bad.json", 1.01 * 4.669510165504654 / 2.0);
    let out = knds(&["inverse", "--traces", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace_consistency"));
}

#[test]
fn inverse_needs_exactly_one_input_source() {
    assert_eq!(knds(&["inverse"]).status.code(), Some(1));
    let out = knds(&[
        "inverse", "--traces", "/tmp/x.json", "--gamma0-event", "4.0", "--gamma1-event",
        "4.1", "--gamma0-cosmo", "41.0", "--gamma1-cosmo", "41.4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = knds(&["inverse", "--gamma0-event", "4.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn roundtrip_single_recovers_parameters() {
    let out = knds(&[&["roundtrip"], &CANONICAL[..]].concat());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["trace_source"], "closed-form");
    assert!(doc["max_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn roundtrip_batch_is_seed_deterministic() {
    let args = ["roundtrip", "--seed", "11", "--draws", "5"];
    let first = knds(&args);
    let second = knds(&args);
    assert!(first.status.success(), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);

    let doc = stdout_json(&first);
    assert_eq!(doc["draws"], 5);
    assert_eq!(doc["results"].as_array().unwrap().len(), 5);
    assert!(doc["max_error"].as_f64().unwrap() < 1e-7);

    let other = knds(&["roundtrip", "--seed", "12", "--draws", "5"]);
    assert_ne!(first.stdout, other.stdout, "different seeds draw differently");
}

#[test]
fn roundtrip_with_numerical_traces_reports_spectral_error_levels() {
    let out = knds(&[
        &["roundtrip"],
        &CANONICAL[..],
        &["--use-numerical-traces", "--grid", "1024", "--count", "40"],
    ]
    .concat());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["trace_source"], "numerical-spectrum");
    let max = doc["max_error"].as_f64().unwrap();
    // Regression band for the measured-spectrum route at this grid and
    // count: well below a percent, far above closed-form rounding.
    assert!(
        (1e-7..0.01).contains(&max),
        "numerical round-trip error {max} left its regression band"
    );
}

#[test]
fn roundtrip_rejects_mixed_and_missing_sources() {
    let out = knds(&["roundtrip", "--seed", "3", "--mass", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(knds(&["roundtrip"]).status.code(), Some(1));
    assert_eq!(
        knds(&["roundtrip", "--seed", "3", "--draws", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn output_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = knds(&[
        &["forward"],
        &CANONICAL[..],
        &["--output", path.to_str().unwrap()],
    ]
    .concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "report went to the file, not stdout");
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], "1");
    assert!(text.ends_with('\n'));
}
