//! End-to-end tests of the command-line interface: exit codes, report
//! contents, and the byte-determinism contract for machine output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cohassist"))
}

fn states_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../states")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("cohassist-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn validate_accepts_shipped_qubit() {
    let path = states_dir().join("qubit.json");
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("valid: true"));
    assert!(text.contains("eigenvalues"));
}

#[test]
fn validate_rejects_non_hermitian_with_exit_2() {
    let path = write_temp(
        "nonhermitian.json",
        r#"{"dim": 2, "matrix": [[[0.5, 0.0], [0.1, 0.1]], [[0.1, 0.1], [0.5, 0.0]]]}"#,
    );
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("NotHermitian"), "stderr: {err}");
}

#[test]
fn validate_rejects_wrong_trace_with_exit_2() {
    let path = write_temp(
        "trace.json",
        r#"{"dim": 2, "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]]}"#,
    );
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TraceNotOne"));
}

#[test]
fn validate_rejects_garbage_with_exit_2() {
    let path = write_temp("garbage.json", "not json at all");
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_rejects_zero_dimension_with_exit_2() {
    let path = write_temp("zerodim.json", r#"{"dim": 0, "matrix": []}"#);
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn measures_machine_output_has_expected_values() {
    let path = states_dir().join("qubit.json");
    let out = run(&["measures", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(report["tool"]["name"], "cohassist");
    assert_eq!(report["input"]["dim"], 2);
    let results = &report["results"];
    assert_eq!(results["kind"], "measures");
    // Δ(ρ) uniform: S(Δ) = 1 bit; S(ρ) = H(3/4); l1 = 2·0.25.
    let c_a = results["c_a_infinity"].as_f64().unwrap();
    assert!((c_a - 1.0).abs() < 1e-15);
    let c_l1 = results["c_l1"].as_f64().unwrap();
    assert!((c_l1 - 0.5).abs() < 1e-15);
    let c_r = results["c_r"].as_f64().unwrap();
    let expected_cr = 1.0 - (-(0.75f64.log2() * 0.75 + 0.25f64.log2() * 0.25));
    assert!((c_r - expected_cr).abs() < 1e-12);
}

#[test]
fn machine_reports_are_byte_deterministic() {
    let path = states_dir().join("qutrit.json");
    let args = [
        "saturate",
        path.to_str().unwrap(),
        "--seed",
        "42",
        "--format",
        "machine",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "machine output must be byte-identical");
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["results"]["verdict"], "saturated");
    assert_eq!(report["results"]["method"], "qutrit-real");
    assert_eq!(report["params"]["seed"], 42);
}

#[test]
fn machine_floats_round_trip_losslessly() {
    let path = states_dir().join("qubit.json");
    let out = run(&["measures", path.to_str().unwrap(), "--format", "machine"]);
    let text = stdout(&out);
    // 17 significant digits in scientific notation.
    assert!(text.contains("e0") || text.contains("e-"), "scientific floats expected: {text}");
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let c_a = report["results"]["c_a_infinity"].as_f64().unwrap();
    assert_eq!(c_a, 1.0, "parsed float must equal the computed value exactly");
}

#[test]
fn saturate_reports_sign_pattern_for_ndim4() {
    let path = states_dir().join("ndim4.json");
    let out = run(&["saturate", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["results"]["method"], "ndim-sign-pattern");
    let members = report["results"]["witness"]["members"].as_array().unwrap();
    assert_eq!(members.len(), 4);
    let w0 = members[0]["weight"].as_f64().unwrap();
    assert!((w0 - 0.55).abs() < 1e-9);
}

#[test]
fn saturate_exhausted_search_exits_3() {
    // Valid 4-dim state whose off-diagonal phases are not cycle
    // consistent; with budget 0 no method applies.
    let e = |m: f64, p: f64| (m * p.cos(), m * p.sin());
    let mut entries = vec![vec![(0.25, 0.0); 4]; 4];
    let phases = [
        ((0, 1), 0.3),
        ((0, 2), 1.1),
        ((0, 3), 2.0),
        ((1, 2), 0.5),
        ((1, 3), -0.7),
        ((2, 3), 1.9),
    ];
    for &((i, j), phi) in &phases {
        let (re, im) = e(0.02, phi);
        entries[i][j] = (re, im);
        entries[j][i] = (re, -im);
    }
    let rows: Vec<String> = entries
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|(re, im)| format!("[{re}, {im}]")).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let json = format!("{{\"dim\": 4, \"matrix\": [{}]}}", rows.join(", "));
    let path = write_temp("complex4.json", &json);

    let out = run(&[
        "saturate",
        path.to_str().unwrap(),
        "--budget",
        "0",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["results"]["verdict"], "not-found");
    assert!(report["results"]["optimizer_lower_bound"].as_f64().is_some());
}

#[test]
fn protocol_enumerate_hits_ceiling_on_shipped_states() {
    for name in ["qubit.json", "qutrit.json", "ndim4.json"] {
        let path = states_dir().join(name);
        let out = run(&["protocol", path.to_str().unwrap(), "--format", "machine"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let results = &report["results"];
        let avg = results["average_coherence"].as_f64().unwrap();
        let ceiling = results["ceiling"].as_f64().unwrap();
        assert!(
            (avg - ceiling).abs() < 1e-9,
            "{name}: average {avg} vs ceiling {ceiling}"
        );
        assert_eq!(results["used_fallback"], false, "{name}");
    }
}

#[test]
fn protocol_accepts_user_ensemble_file() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ensemble = format!(
        r#"{{
  "dim": 2,
  "members": [
    {{"weight": 0.75, "amplitudes": [[{s}, 0.0], [{s}, 0.0]]}},
    {{"weight": 0.25, "amplitudes": [[{s}, 0.0], [{mns}, 0.0]]}}
  ]
}}"#,
        s = s,
        mns = -s
    );
    let ens_path = write_temp("ensemble.json", &ensemble);
    let state_path = states_dir().join("qubit.json");
    let out = run(&[
        "protocol",
        state_path.to_str().unwrap(),
        "--ensemble-file",
        ens_path.to_str().unwrap(),
        "--mode",
        "sample",
        "--shots",
        "5000",
        "--seed",
        "3",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let results = &report["results"];
    assert_eq!(results["strategy"], "user-ensemble");
    let counts = results["sample_stats"]["counts"].as_array().unwrap();
    let total: u64 = counts.iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 5000);
    let avg = results["average_coherence"].as_f64().unwrap();
    assert!((avg - 1.0).abs() < 1e-12);
}

#[test]
fn protocol_rejects_mismatched_user_ensemble() {
    let ensemble = r#"{
  "dim": 2,
  "members": [{"weight": 1.0, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}]
}"#;
    let ens_path = write_temp("bad-ensemble.json", ensemble);
    let state_path = states_dir().join("qubit.json");
    let out = run(&[
        "protocol",
        state_path.to_str().unwrap(),
        "--ensemble-file",
        ens_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reconstruct"));
}

#[test]
fn assist_reports_small_gap_on_qubit() {
    let path = states_dir().join("qubit.json");
    let out = run(&[
        "assist",
        path.to_str().unwrap(),
        "--restarts",
        "40",
        "--seed",
        "11",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let gap = report["results"]["gap"].as_f64().unwrap();
    assert!(gap.abs() < 1e-6, "gap {gap}");
}
