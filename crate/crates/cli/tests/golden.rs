//! Golden-file coverage of every emitter: transform/region/sweep/event
//! CSVs, plan and simulation JSON, and the four reference diagrams. Run
//! with UPDATE_GOLDEN=1 to regenerate after an intentional format change.

mod common;

use common::{golden_check, read_out, repo_config, run_ok};
use tempfile::tempdir;

fn write_config(json: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, json).unwrap();
    (dir, path)
}

#[test]
fn transform_csv_matches_golden() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "transform": {
                "boost": {"beta": 0.6},
                "direction": "forward",
                "events": [
                    {"ct_m": 10.0, "x_m": -20.0},
                    {"ct_m": 0.0, "x_m": 0.0},
                    {"ct_m": -3.0, "x_m": -21.8},
                    {"ct_m": 30000000.0, "x_m": 0.0}
                ]
            }
        }"#,
    );
    let out = run_ok(&["transform", "--config", cfg.to_str().unwrap()], &[]);
    golden_check("transform_toy.csv", &out.stdout);
}

#[test]
fn plan_json_matches_golden() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "plan": {
                "v_m_per_s": 100.0,
                "x0_m": -90010.0,
                "t1_s": 0.1,
                "storage_latency_s": 1e-10
            }
        }"#,
    );
    let outdir = tempdir().unwrap();
    let out = run_ok(
        &[
            "plan",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            outdir.path().to_str().unwrap(),
        ],
        &[],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("feasible:           yes"));
    golden_check("plan_realistic.json", &read_out(outdir.path(), "plan.json"));
}

#[test]
fn sweep_csv_matches_golden() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "plan": {
                "v_m_per_s": 100.0,
                "x0_m": -90010.0,
                "t1_s": 0.1,
                "storage_latency_s": 1e-10,
                "sweep": {
                    "v_m_per_s": {"min": 0.0, "max": 200.0, "count": 3},
                    "x0_m": {"min": -120000.0, "max": -60000.0, "count": 2}
                }
            }
        }"#,
    );
    let out = run_ok(&["plan", "--config", cfg.to_str().unwrap(), "--sweep"], &[]);
    golden_check("sweep_small.csv", &out.stdout);
}

#[test]
fn simulation_outputs_match_golden() {
    let (_dir, cfg) = write_config(
        r#"{
            "schema_version": 1,
            "simulate": {
                "model": "collapsed_sequential",
                "n_events": 40,
                "seed": 3,
                "export_events": true
            }
        }"#,
    );
    let outdir = tempdir().unwrap();
    run_ok(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            outdir.path().to_str().unwrap(),
        ],
        &[],
    );
    golden_check("sim_report_seed3.json", &read_out(outdir.path(), "report.json"));
    golden_check("sim_events_seed3.csv", &read_out(outdir.path(), "events.csv"));
}

fn diagram_outputs(config_name: &str) -> (tempfile::TempDir, Vec<u8>) {
    let outdir = tempdir().unwrap();
    run_ok(
        &[
            "diagram",
            "--config",
            repo_config(config_name).to_str().unwrap(),
            "--out",
            outdir.path().to_str().unwrap(),
        ],
        &[],
    );
    let svg = read_out(outdir.path(), "diagram.svg");
    (outdir, svg)
}

#[test]
fn single_rest_diagram_matches_golden() {
    let (_outdir, svg) = diagram_outputs("fig_single_rest.json");
    golden_check("fig_single_rest.svg", &svg);
}

#[test]
fn window_moving_diagram_matches_golden() {
    let (outdir, svg) = diagram_outputs("fig_window_moving.json");
    golden_check("fig_window_moving.svg", &svg);
    golden_check(
        "fig_window_moving_window.csv",
        &read_out(outdir.path(), "window.csv"),
    );
}

#[test]
fn four_regions_diagram_matches_golden() {
    let (_outdir, svg) = diagram_outputs("fig_four_regions.json");
    golden_check("fig_four_regions.svg", &svg);
}

#[test]
fn lab_frame_diagram_matches_golden() {
    let (outdir, svg) = diagram_outputs("fig_lab_frame.json");
    golden_check("fig_lab_frame.svg", &svg);
    golden_check(
        "fig_lab_frame_worldlines.csv",
        &read_out(outdir.path(), "worldlines.csv"),
    );
    golden_check(
        "fig_lab_frame_events.csv",
        &read_out(outdir.path(), "events.csv"),
    );
}
