//! End-to-end CLI tests: the default pipeline, exit-code contract, and
//! JSON output schemas.

mod common;

use std::io::Write as _;
use std::path::Path;
use std::process::Command;

use common::conditional_paper_vector;
use corrpoly::vector::write_vector;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_corrpoly")
}

fn run_cli(args: &[&str], out_dir: &Path) -> std::process::Output {
    Command::new(bin())
        .args(args)
        .env("CORRPOLY_OUT_DIR", out_dir)
        .output()
        .expect("failed to launch the CLI")
}

#[test]
fn full_default_pipeline_exits_zero_at_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = run_cli(&["epr-vector"], d);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let vector = d.join("epr_vector.json");
    assert!(vector.exists());

    let out = run_cli(&["membership", "--vector", vector.to_str().unwrap()], d);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = d.join("membership_report.json");
    let parsed: serde_json::Value =
        serde_json::from_reader(std::fs::File::open(&report).unwrap()).unwrap();
    assert_eq!(parsed["verdict"], "inside");
    assert!(parsed["model"].as_array().unwrap().len() <= 37);
    assert!(parsed["meta"]["version"].is_string());
    assert!(parsed["meta"]["inputs"]["vector"].is_string());

    // smaller N keeps the suite quick; the statistical gate runs in acceptance
    let out = run_cli(
        &[
            "simulate",
            "--model", report.to_str().unwrap(),
            "--target", vector.to_str().unwrap(),
            "--samples", "20000",
            "--seed", "42",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let sim: serde_json::Value =
        serde_json::from_reader(std::fs::File::open(d.join("simulation.json")).unwrap()).unwrap();
    assert_eq!(sim["seed"], 42);
    assert_eq!(sim["samples"], 20000);
    assert_eq!(sim["generator"], "chacha12/per-trial-stream");
    assert_eq!(sim["comparison"]["pass"], true);
    assert!(sim["conditionals"]["A&B|a&b"].is_string());
}

#[test]
fn membership_rejects_out_of_range_input_with_64() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "events": [{"label": "x", "role": "outcome"}],
            "singles": {"x": "2"},
            "pairs": {}
        }"#,
    )
    .unwrap();
    let out = run_cli(&["membership", "--vector", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(64));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("outside [0, 1]"), "{stderr}");
}

#[test]
fn malformed_files_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "not json").unwrap();
    for sub in ["membership", "ch"] {
        let out = run_cli(&[sub, "--vector", path.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(64), "{sub}");
    }
    let out = run_cli(&["epr-vector", "--scenario", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(64));
    let out = run_cli(
        &["simulate", "--model", path.to_str().unwrap(), "--target", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn simulate_wrong_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_cli(&["epr-vector"], d);
    let vector = d.join("epr_vector.json");
    run_cli(&["membership", "--vector", vector.to_str().unwrap()], d);
    let report = d.join("membership_report.json");

    // deliberately wrong target: p(A&B) = 1/8 instead of 3/32
    let content = std::fs::read_to_string(&vector).unwrap();
    let wrong = content.replace("\"A&B\": \"3/32\"", "\"A&B\": \"1/8\"");
    assert_ne!(wrong, content);
    let wrong_path = d.join("wrong_target.json");
    std::fs::write(&wrong_path, wrong).unwrap();

    let out = run_cli(
        &[
            "simulate",
            "--model", report.to_str().unwrap(),
            "--target", wrong_path.to_str().unwrap(),
            "--samples", "100000",
            "--seed", "42",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn epr_vector_equal_directions_kill_outcome_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(
        &["epr-vector", "--angles", "0,0,0,0", "--format", "table"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let (v, _) = corrpoly::vector::read_vector(
        std::fs::File::open(dir.path().join("epr_vector.json")).unwrap(),
    )
    .unwrap();
    use num_traits::Zero;
    for (x, y) in [("A", "B"), ("A", "B'"), ("A'", "B"), ("A'", "B'")] {
        let i = v.space.index_of(x).unwrap();
        let j = v.space.index_of(y).unwrap();
        assert!(v.pair(i, j).is_zero());
    }
}

#[test]
fn conventions_agree_at_paper_angles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run_cli(&["epr-vector", "-o", d.join("p.json").to_str().unwrap()], d);
    assert_eq!(out.status.code(), Some(0));
    let out = run_cli(
        &["epr-vector", "--convention", "standard",
          "-o", d.join("s.json").to_str().unwrap()],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read_to_string(d.join("p.json")).unwrap();
    let b = std::fs::read_to_string(d.join("s.json")).unwrap();
    assert_eq!(a, b, "paper and standard conventions must agree at 0 and 120 degrees");
}

#[test]
fn oracle_reports_paper_values_and_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(&["oracle"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("3/8"), "{stdout}");

    // at 60 degrees the two conventions diverge; the oracle matches standard
    let out = run_cli(&["oracle", "--angles", "60"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0.125"), "{stdout}");
    assert!(stdout.contains("3/8"), "{stdout}");
}

#[test]
fn trace_flag_writes_per_trial_log() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_cli(&["epr-vector"], d);
    let vector = d.join("epr_vector.json");
    run_cli(&["membership", "--vector", vector.to_str().unwrap()], d);
    let report = d.join("membership_report.json");
    let out = run_cli(
        &[
            "simulate",
            "--model", report.to_str().unwrap(),
            "--target", vector.to_str().unwrap(),
            "--samples", "100",
            "--trace",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    let trace = std::fs::read_to_string(d.join("simulation.trace.ndjson")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 100);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert!(first["world"].is_string());
    assert!(first["left_setting"].is_string());
}

#[test]
fn table_format_prints_flattened_vector() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(&["epr-vector", "--format", "table"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("a&b") && stdout.contains("1/4"), "{stdout}");
}

#[test]
fn ch_rejects_wrong_shape_with_64() {
    let dir = tempfile::tempdir().unwrap();
    run_cli(&["epr-vector"], dir.path());
    let vector = dir.path().join("epr_vector.json");
    let out = run_cli(&["ch", "--vector", vector.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn membership_table_output_lists_model_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let v = conditional_paper_vector();
    let path = d.join("cond.json");
    let mut buf = Vec::new();
    write_vector(&v, &mut buf).unwrap();
    std::fs::File::create(&path).unwrap().write_all(&buf).unwrap();
    let out = run_cli(&["membership", "--vector", path.to_str().unwrap(), "--format", "table"], d);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("outside") && stdout.contains("1/8"), "{stdout}");
}
