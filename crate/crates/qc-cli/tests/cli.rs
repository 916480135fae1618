//! End-to-end tests of the binary: exit codes, determinism, and the
//! emit/check round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qc-cli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir.join(name)
}

#[test]
fn flat_chart_run_passes_with_exit_zero() {
    let json = scratch("flat.json");
    let out = run(&[
        "check",
        "--example",
        "heisenberg",
        "--n",
        "1",
        "--points",
        "2",
        "--seed",
        "5",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS: every required check is exactly zero"));
    assert!(stdout.contains("torsion-free, Scal = 0"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["all_required_zero"], serde_json::Value::Bool(true));
    assert_eq!(report["chart"], "heisenberg-n1");
}

#[test]
fn identical_configs_give_byte_identical_reports() {
    let first = scratch("det-a.json");
    let second = scratch("det-b.json");
    let args = |path: &PathBuf| {
        vec![
            "check".to_string(),
            "--example".into(),
            "heisenberg".into(),
            "--points".into(),
            "2".into(),
            "--seed".into(),
            "42".into(),
            "--prescreen".into(),
            "--json".into(),
            path.to_str().unwrap().to_string(),
        ]
    };
    let out_a = bin().args(args(&first)).output().unwrap();
    let out_b = bin().args(args(&second)).output().unwrap();
    assert_eq!(out_a.status.code(), Some(0));
    assert_eq!(out_b.status.code(), Some(0));
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "reports must be byte-identical"
    );
}

#[test]
fn deformed_run_reports_generic_torsion_and_still_passes() {
    // Nonzero torsion and a non-closed 4-form are expected findings on a
    // deformed chart, not failures: the informative checks go nonzero
    // with witnesses while every required identity stays zero.
    let json = scratch("deformed.json");
    let out = run(&[
        "check",
        "--example",
        "heisenberg",
        "--n",
        "1",
        "--deform",
        "1 + x1^2",
        "--points",
        "2",
        "--seed",
        "3",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("generic (torsion ≠ 0)"));
    assert!(stdout.contains("PASS"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let checks = report["points"][0]["checks"].as_array().unwrap();
    let four_form = checks
        .iter()
        .find(|c| c["name"] == "four_form_closed")
        .expect("informative 4-form check present");
    assert_eq!(four_form["status"], "nonzero");
    assert!(four_form["witness"].as_str().unwrap().len() > 0);
}

#[test]
fn missing_chart_file_exits_two() {
    let out = run(&["check", "--chart", "missing.json"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
}

#[test]
fn invalid_flag_combinations_exit_two() {
    // No chart source at all.
    assert_eq!(run(&["check"]).status.code(), Some(2));
    // Both sources at once (rejected by argument parsing).
    let out = run(&[
        "check",
        "--example",
        "heisenberg",
        "--chart",
        "x.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown example name.
    assert_eq!(
        run(&["check", "--example", "torus", "--points", "1"])
            .status
            .code(),
        Some(2)
    );
    // Unknown suite name.
    assert_eq!(
        run(&["check", "--example", "heisenberg", "--suites", "magic"])
            .status
            .code(),
        Some(2)
    );
    // Jet order too low for the connection-based suites.
    assert_eq!(
        run(&["check", "--example", "heisenberg", "--jet-order", "2"])
            .status
            .code(),
        Some(2)
    );
    // Unknown example for emit.
    let path = scratch("unknown-emit.json");
    assert_eq!(
        run(&["emit", "torus", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn emit_then_check_matches_the_builtin_example() {
    let chart_path = scratch("emitted.json");
    let out = run(&["emit", "heisenberg", chart_path.to_str().unwrap(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let chart: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&chart_path).unwrap()).unwrap();
    assert_eq!(chart["coordinates"].as_array().unwrap().len(), 7);

    // A run on the emitted file is byte-identical to a run on the
    // built-in example under the same configuration.
    let from_file = scratch("from-file.json");
    let from_example = scratch("from-example.json");
    let out = run(&[
        "check",
        "--chart",
        chart_path.to_str().unwrap(),
        "--points",
        "2",
        "--seed",
        "9",
        "--json",
        from_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = run(&[
        "check",
        "--example",
        "heisenberg",
        "--n",
        "1",
        "--points",
        "2",
        "--seed",
        "9",
        "--json",
        from_example.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert_eq!(
        std::fs::read(&from_file).unwrap(),
        std::fs::read(&from_example).unwrap()
    );
}

#[test]
fn chart_n_flag_must_match_the_file() {
    let chart_path = scratch("match-n.json");
    assert_eq!(
        run(&["emit", "heisenberg", chart_path.to_str().unwrap(), "--n", "1"])
            .status
            .code(),
        Some(0)
    );
    let out = run(&[
        "check",
        "--chart",
        chart_path.to_str().unwrap(),
        "--n",
        "2",
        "--points",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
