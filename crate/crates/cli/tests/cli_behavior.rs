//! Contract tests for the binary: exit codes, error wording, seed
//! overrides, stdout/file equivalence, and thread-count independence.

mod common;

use common::{bin, read_out, run, run_ok};
use std::process::Command;
use tempfile::tempdir;

fn write_config(json: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, json).unwrap();
    (dir, path)
}

fn stderr_of(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

#[test]
fn malformed_json_exits_2_with_position() {
    let (_dir, cfg) = write_config("{\"schema_version\": 1,\n  \"plan\": {,}\n}");
    let out = run(&["plan", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("column"), "stderr: {err}");
}

#[test]
fn unknown_key_exits_2_and_names_the_key() {
    let (_dir, cfg) = write_config(
        r#"{"schema_version": 1, "plan": {"v_m_per_s": 1.0, "x0_m": -1.0, "t1_s": 1.0, "storage_latency_s": 0.0, "window_s": 1.0}}"#,
    );
    let out = run(&["plan", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("window_s"));
}

#[test]
fn wrong_schema_version_exits_2() {
    let (_dir, cfg) = write_config(r#"{"schema_version": 99}"#);
    let out = run(&["plan", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("schema_version"));
}

#[test]
fn missing_block_exits_2() {
    let (_dir, cfg) = write_config(r#"{"schema_version": 1}"#);
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("simulate"));
}

#[test]
fn out_of_range_value_exits_2() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "transform": {
                "boost": {"beta": 1.2},
                "direction": "forward",
                "events": [{"ct_m": 0.0, "x_m": 0.0}]
            }
        }"#,
    );
    let out = run(&["transform", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("beta"));
}

#[test]
fn missing_config_file_exits_2() {
    let out = run(&["plan", "--config", "/nonexistent/run.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let out = Command::new(bin())
        .args(["plan", "--config", "x.json", "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_plan_still_exits_0() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "plan": {
                "v_m_per_s": 100.0,
                "x0_m": -10.0,
                "t1_s": 0.1,
                "storage_latency_s": 1e-10
            }
        }"#,
    );
    let out = run_ok(&["plan", "--config", cfg.to_str().unwrap()], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("feasible:           no"), "stdout: {text}");
    assert!(text.contains("insufficient_window"), "stdout: {text}");
}

const SIM_CONFIG: &str = r#"{
    "schema_version": 1,
    "simulate": {
        "model": "uncollapsed_double",
        "n_events": 5000,
        "seed": 11,
        "export_events": true
    }
}"#;

#[test]
fn seed_flag_overrides_config_seed() {
    let (_dir, cfg) = write_config(SIM_CONFIG);
    let base = run_ok(&["simulate", "--config", cfg.to_str().unwrap()], &[]);
    let same = run_ok(
        &["simulate", "--config", cfg.to_str().unwrap(), "--seed", "11"],
        &[],
    );
    let other = run_ok(
        &["simulate", "--config", cfg.to_str().unwrap(), "--seed", "12"],
        &[],
    );
    assert_eq!(base.stdout, same.stdout);
    assert_ne!(base.stdout, other.stdout);
    let text = String::from_utf8(other.stdout).unwrap();
    assert!(text.contains("seed:               12"));
}

#[test]
fn thread_count_does_not_change_results() {
    let (_dir, cfg) = write_config(SIM_CONFIG);
    let out1 = tempdir().unwrap();
    let out7 = tempdir().unwrap();
    run_ok(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out1.path().to_str().unwrap(),
        ],
        &[("COLLAPSE_SIM_THREADS", "1")],
    );
    run_ok(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out7.path().to_str().unwrap(),
        ],
        &[("COLLAPSE_SIM_THREADS", "7")],
    );
    assert_eq!(
        read_out(out1.path(), "report.json"),
        read_out(out7.path(), "report.json")
    );
    assert_eq!(
        read_out(out1.path(), "events.csv"),
        read_out(out7.path(), "events.csv")
    );
}

#[test]
fn invalid_thread_env_exits_2() {
    let (_dir, cfg) = write_config(SIM_CONFIG);
    let out = run(
        &["simulate", "--config", cfg.to_str().unwrap()],
        &[("COLLAPSE_SIM_THREADS", "many")],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("COLLAPSE_SIM_THREADS"));
}

#[test]
fn stdout_and_file_outputs_are_identical() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "regions": {
                "bounds": {"ct_min_m": 0.0, "ct_max_m": 10.0, "x_min_m": -10.0, "x_max_m": 10.0},
                "resolution": {"n_ct": 6, "n_x": 6},
                "measurements": [
                    {"detector_id": "D1", "ct_m": 5.0, "x_m": 0.0, "detector_beta": -0.6}
                ]
            }
        }"#,
    );
    let streamed = run_ok(&["regions", "--config", cfg.to_str().unwrap()], &[]);
    let outdir = tempdir().unwrap();
    run_ok(
        &[
            "regions",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            outdir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(streamed.stdout, read_out(outdir.path(), "regions.csv"));
}

#[test]
fn unwritable_out_dir_exits_1() {
    let (_dir, cfg) = write_config(SIM_CONFIG);
    let blocker = tempdir().unwrap();
    let file_path = blocker.path().join("not_a_dir");
    std::fs::write(&file_path, b"occupied").unwrap();
    let out = run(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            file_path.join("sub").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn closed_stdout_reader_is_not_an_error() {
    use std::io::{BufRead, BufReader};
    // A grid far larger than any pipe buffer, so the child is still
    // writing when the reader hangs up.
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "regions": {
                "bounds": {"ct_min_m": 0.0, "ct_max_m": 10.0, "x_min_m": -10.0, "x_max_m": 10.0},
                "resolution": {"n_ct": 300, "n_x": 300},
                "measurements": [{"detector_id": "D1", "ct_m": 5.0, "x_m": 0.0}]
            }
        }"#,
    );
    let mut child = Command::new(bin())
        .args(["regions", "--config", cfg.to_str().unwrap()])
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut reader = BufReader::new(child.stdout.take().unwrap());
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        assert!(line.starts_with("i_ct,"), "unexpected header: {line}");
        // Dropping the reader closes our end of the pipe.
    }
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success(), "exit: {:?}", out.status);
    assert!(out.stderr.is_empty(), "stderr: {}", stderr_of(&out));
}
