//! Typed CSV rows and the converters from scene/report structures. All
//! floats go through the csv crate's shortest-round-trip formatting, so a
//! value read back with a strict f64 parser is bit-identical.

use std::io::Write;

use anyhow::Result;
use collapse_core::experiment_planner::ExperimentPlan;
use collapse_core::simulation::{sample_event, SimulationConfig};
use collapse_core::two_photon_state::Pol;
use collapse_core::{Event, RegionGrid};
use serde::Serialize;

use crate::diagram::{region_code, region_label, Scene};

pub fn write_rows<T: Serialize, W: Write>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Column order: ct_in_m, x_in_m, ct_out_m, x_out_m.
#[derive(Debug, Serialize)]
pub struct TransformRow {
    pub ct_in_m: f64,
    pub x_in_m: f64,
    pub ct_out_m: f64,
    pub x_out_m: f64,
}

/// Column order: i_ct, i_x, ct_m, x_m, region_code, region_label.
#[derive(Debug, Serialize)]
pub struct RegionRow {
    pub i_ct: usize,
    pub i_x: usize,
    pub ct_m: f64,
    pub x_m: f64,
    pub region_code: String,
    pub region_label: String,
}

pub fn region_rows(grid: &RegionGrid) -> Vec<RegionRow> {
    let mut rows = Vec::with_capacity(grid.n_ct() * grid.n_x());
    for i_ct in 0..grid.n_ct() {
        for i_x in 0..grid.n_x() {
            let c = grid.center(i_ct, i_x);
            let r = grid.cell(i_ct, i_x);
            rows.push(RegionRow {
                i_ct,
                i_x,
                ct_m: c.ct,
                x_m: c.x,
                region_code: region_code(r),
                region_label: region_label(r),
            });
        }
    }
    rows
}

/// Column order: detector_id, slope, anchor_ct_m, anchor_x_m, then the
/// visible segment endpoints (empty when the line misses the bounds).
#[derive(Debug, Serialize)]
pub struct CollapseLineRow {
    pub detector_id: String,
    pub slope: f64,
    pub anchor_ct_m: f64,
    pub anchor_x_m: f64,
    pub ct_start_m: Option<f64>,
    pub x_start_m: Option<f64>,
    pub ct_end_m: Option<f64>,
    pub x_end_m: Option<f64>,
}

pub fn collapse_line_rows(scene: &Scene) -> Vec<CollapseLineRow> {
    scene
        .collapse_lines
        .iter()
        .map(|l| CollapseLineRow {
            detector_id: l.detector_id.clone(),
            slope: l.line.slope,
            anchor_ct_m: l.line.anchor.ct,
            anchor_x_m: l.line.anchor.x,
            ct_start_m: l.visible.map(|(a, _)| a.ct),
            x_start_m: l.visible.map(|(a, _)| a.x),
            ct_end_m: l.visible.map(|(_, b)| b.ct),
            x_end_m: l.visible.map(|(_, b)| b.x),
        })
        .collect()
}

/// Column order: label, kind, ct_start_m, x_start_m, ct_end_m, x_end_m.
#[derive(Debug, Serialize)]
pub struct WorldlineRow {
    pub label: String,
    pub kind: &'static str,
    pub ct_start_m: f64,
    pub x_start_m: f64,
    pub ct_end_m: f64,
    pub x_end_m: f64,
}

pub fn worldline_rows(scene: &Scene) -> Vec<WorldlineRow> {
    scene
        .worldlines
        .iter()
        .map(|s| WorldlineRow {
            label: s.label.clone(),
            kind: s.kind.as_str(),
            ct_start_m: s.a.ct,
            x_start_m: s.a.x,
            ct_end_m: s.b.ct,
            x_end_m: s.b.x,
        })
        .collect()
}

/// Column order: label, ct_m, x_m.
#[derive(Debug, Serialize)]
pub struct EventRow {
    pub label: String,
    pub ct_m: f64,
    pub x_m: f64,
}

pub fn event_rows(scene: &Scene) -> Vec<EventRow> {
    scene
        .events
        .iter()
        .map(|e| EventRow {
            label: e.label.clone(),
            ct_m: e.event.ct,
            x_m: e.event.x,
        })
        .collect()
}

/// Column order: detector_id, branch, apex_ct_m, apex_x_m, end_ct_m,
/// end_x_m.
#[derive(Debug, Serialize)]
pub struct LightConeRow {
    pub detector_id: String,
    pub branch: &'static str,
    pub apex_ct_m: f64,
    pub apex_x_m: f64,
    pub end_ct_m: f64,
    pub end_x_m: f64,
}

pub fn light_cone_rows(scene: &Scene) -> Vec<LightConeRow> {
    scene
        .light_cones
        .iter()
        .map(|c| LightConeRow {
            detector_id: c.label.clone(),
            branch: c.branch,
            apex_ct_m: c.apex.ct,
            apex_x_m: c.apex.x,
            end_ct_m: c.end.ct,
            end_x_m: c.end.x,
        })
        .collect()
}

/// Column order: detector_id, vertex, ct_m, x_m. Three rows per window
/// (apex, base, tip).
#[derive(Debug, Serialize)]
pub struct WindowRow {
    pub detector_id: String,
    pub vertex: &'static str,
    pub ct_m: f64,
    pub x_m: f64,
}

pub fn window_rows(scene: &Scene) -> Vec<WindowRow> {
    let mut rows = Vec::new();
    for w in &scene.windows {
        for (vertex, e) in [("apex", w.vertices[0]), ("base", w.vertices[1]), ("tip", w.vertices[2])]
        {
            rows.push(WindowRow {
                detector_id: w.detector_id.clone(),
                vertex,
                ct_m: e.ct,
                x_m: e.x,
            });
        }
    }
    rows
}

fn pol_str(p: Pol) -> &'static str {
    match p {
        Pol::H => "H",
        Pol::V => "V",
    }
}

/// Column order: event_index, pol_signal, pol_idler, final_pol_signal,
/// final_pol_idler, omega_s_rad_per_s, omega_i_rad_per_s,
/// residual_rad_per_s. Unsampled observables leave their columns empty.
#[derive(Debug, Serialize)]
pub struct SimEventRow {
    pub event_index: u64,
    pub pol_signal: Option<&'static str>,
    pub pol_idler: Option<&'static str>,
    pub final_pol_signal: Option<&'static str>,
    pub final_pol_idler: Option<&'static str>,
    pub omega_s_rad_per_s: Option<f64>,
    pub omega_i_rad_per_s: Option<f64>,
    pub residual_rad_per_s: Option<f64>,
}

/// Streams every event of a run as one CSV row, recomputing each sample
/// from its per-event stream so the export matches the statistics exactly.
pub fn write_sim_events<W: Write>(out: W, config: &SimulationConfig) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for index in 0..config.n_events {
        let s = sample_event(config, index);
        w.serialize(SimEventRow {
            event_index: s.index,
            pol_signal: s.polarizations.map(|(a, _)| pol_str(a)),
            pol_idler: s.polarizations.map(|(_, b)| pol_str(b)),
            final_pol_signal: s.final_polarizations.map(|(a, _)| pol_str(a)),
            final_pol_idler: s.final_polarizations.map(|(_, b)| pol_str(b)),
            omega_s_rad_per_s: s.frequencies.map(|(a, _)| a),
            omega_i_rad_per_s: s.frequencies.map(|(_, b)| b),
            residual_rad_per_s: s.residual,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Column order: the four swept inputs, storage_latency_s, feasible,
/// reasons (joined with '+', empty when feasible), then the derived
/// quantities. required_dx12_m is empty when v = 0.
#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub v_m_per_s: f64,
    pub x0_m: f64,
    pub t1_s: f64,
    pub epsilon_s: f64,
    pub storage_latency_s: f64,
    pub feasible: bool,
    pub reasons: String,
    pub dx12_m: f64,
    pub window_rest_s: f64,
    pub window_moving_s: f64,
    pub window_margin_s: f64,
    pub x1_prime_m: f64,
    pub required_dx12_m: Option<f64>,
}

pub fn sweep_row(p: &ExperimentPlan) -> SweepRow {
    let reasons: Vec<String> = p
        .feasibility
        .reasons
        .iter()
        .map(|r| r.to_string())
        .collect();
    SweepRow {
        v_m_per_s: p.params.v,
        x0_m: p.params.x0,
        t1_s: p.params.t1,
        epsilon_s: p.params.epsilon,
        storage_latency_s: p.params.storage_latency,
        feasible: p.feasibility.feasible,
        reasons: reasons.join("+"),
        dx12_m: p.dx12,
        window_rest_s: p.window_rest,
        window_moving_s: p.window_moving,
        window_margin_s: p.window_margin,
        x1_prime_m: p.x1_prime,
        required_dx12_m: p.feasibility.required_dx12,
    }
}

pub fn transform_rows(pairs: &[(Event, Event)]) -> Vec<TransformRow> {
    pairs
        .iter()
        .map(|(input, output)| TransformRow {
            ct_in_m: input.ct,
            x_in_m: input.x,
            ct_out_m: output.ct,
            x_out_m: output.x,
        })
        .collect()
}
