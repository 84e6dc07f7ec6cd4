//! One function per subcommand. Each command reads its block from the run
//! config, computes through the core crate, and writes either to stdout or
//! into an output directory. File contents are identical either way.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use collapse_core::experiment_planner::{plan, ExperimentPlan};
use collapse_core::simulation;
use collapse_core::spacetime::{boost_event, inverse_boost};
use collapse_core::{collapse_geometry, Event};

use crate::config::{
    build_params, PlanConfig, RunConfig, SweepAxis, TransformConfig, TransformDirection,
};
use crate::csvout::{
    self, collapse_line_rows, event_rows, light_cone_rows, region_rows, sweep_row,
    transform_rows, window_rows, worldline_rows,
};
use crate::diagram::build_scene;
use crate::report::{compare_text, json_pretty, plan_text, sim_text};
use crate::{config_error, domain_config_error, svg};

pub enum OutputTarget {
    Stdout,
    Dir(PathBuf),
}

impl OutputTarget {
    pub fn from_arg(out: Option<PathBuf>) -> OutputTarget {
        match out {
            Some(dir) => OutputTarget::Dir(dir),
            None => OutputTarget::Stdout,
        }
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    // Progress notes are best effort: losing the stdout reader must not
    // abort the remaining file writes.
    let _ = writeln!(std::io::stdout().lock(), "wrote {}", path.display());
    Ok(())
}

/// Writes a command's primary text artifact to stdout. Unlike `print!` this
/// surfaces the io error instead of panicking, so a reader that hangs up
/// early (`collapse-sim ... | head`) unwinds as BrokenPipe.
fn emit_text(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn emit_csv<T: serde::Serialize>(target: &OutputTarget, name: &str, rows: &[T]) -> Result<()> {
    match target {
        OutputTarget::Stdout => {
            let stdout = std::io::stdout();
            csvout::write_rows(stdout.lock(), rows)
        }
        OutputTarget::Dir(dir) => {
            let mut buf = Vec::new();
            csvout::write_rows(&mut buf, rows)?;
            write_file(dir, name, &buf)
        }
    }
}

fn require<'a, T>(block: &'a Option<T>, what: &str) -> Result<&'a T> {
    block
        .as_ref()
        .ok_or_else(|| config_error(format!("this run needs a `{what}` block in the config")))
}

pub fn cmd_transform(cfg: &RunConfig, target: &OutputTarget) -> Result<()> {
    let block: &TransformConfig = require(&cfg.transform, "transform")?;
    let boost = block.boost.to_boost()?;
    let mut pairs: Vec<(Event, Event)> = Vec::with_capacity(block.events.len());
    for e in &block.events {
        let input = e.to_event()?;
        let output = match block.direction {
            TransformDirection::Forward => boost_event(input, &boost),
            TransformDirection::Inverse => inverse_boost(input, &boost),
        }
        .map_err(domain_config_error)?;
        pairs.push((input, output));
    }
    emit_csv(target, "transform.csv", &transform_rows(&pairs))
}

fn sweep_values(axis: Option<SweepAxis>, fixed: f64) -> Result<Vec<f64>> {
    match axis {
        Some(a) => a.values(),
        None => Ok(vec![fixed]),
    }
}

fn run_sweep(block: &PlanConfig) -> Result<Vec<ExperimentPlan>> {
    let sweep = block
        .sweep
        .ok_or_else(|| config_error("`--sweep` needs a sweep block inside plan"))?;
    let vs = sweep_values(sweep.v_m_per_s, block.v_m_per_s)?;
    let x0s = sweep_values(sweep.x0_m, block.x0_m)?;
    let t1s = sweep_values(sweep.t1_s, block.t1_s)?;
    let epsilons = sweep_values(sweep.epsilon_s, block.epsilon_s)?;
    let mut plans = Vec::with_capacity(vs.len() * x0s.len() * t1s.len() * epsilons.len());
    for &v in &vs {
        for &x0 in &x0s {
            for &t1 in &t1s {
                for &epsilon in &epsilons {
                    let params = build_params(v, x0, t1, epsilon, block.storage_latency_s)?;
                    plans.push(plan(&params).map_err(domain_config_error)?);
                }
            }
        }
    }
    Ok(plans)
}

pub fn cmd_plan(cfg: &RunConfig, target: &OutputTarget, sweep: bool) -> Result<()> {
    let block: &PlanConfig = require(&cfg.plan, "plan")?;
    if sweep {
        let rows: Vec<_> = run_sweep(block)?.iter().map(sweep_row).collect();
        return emit_csv(target, "sweep.csv", &rows);
    }
    let params = block.to_params()?;
    let p = plan(&params).map_err(domain_config_error)?;
    emit_text(&plan_text(&p))?;
    if let OutputTarget::Dir(dir) = target {
        write_file(dir, "plan.json", json_pretty(&p)?.as_bytes())?;
    }
    Ok(())
}

pub fn cmd_simulate(
    cfg: &RunConfig,
    target: &OutputTarget,
    seed_override: Option<u64>,
    compare: bool,
) -> Result<()> {
    let block = require(&cfg.simulate, "simulate")?;
    let sim_cfg = block.to_sim_config(seed_override)?;
    let (text, json) = if compare {
        let report = simulation::compare(&sim_cfg)?;
        (compare_text(&report), json_pretty(&report)?)
    } else {
        let report = simulation::run(&sim_cfg)?;
        (sim_text(&report), json_pretty(&report)?)
    };
    emit_text(&text)?;
    if let OutputTarget::Dir(dir) = target {
        write_file(dir, "report.json", json.as_bytes())?;
        if block.export_events {
            let mut buf = Vec::new();
            // The export always replays the configured model, also under
            // --compare.
            csvout::write_sim_events(&mut buf, &sim_cfg)?;
            write_file(dir, "events.csv", &buf)?;
        }
    }
    Ok(())
}

pub fn cmd_diagram(cfg: &RunConfig, target: &OutputTarget) -> Result<()> {
    let block = require(&cfg.diagram, "diagram")?;
    let scene = build_scene(block)?;
    let svg_text = svg::render(&scene);
    match target {
        OutputTarget::Stdout => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(svg_text.as_bytes())?;
        }
        OutputTarget::Dir(dir) => {
            write_file(dir, "diagram.svg", svg_text.as_bytes())?;
            if let Some(grid) = &scene.region_grid {
                emit_csv(target, "regions.csv", &region_rows(grid))?;
            }
            if scene.layers.collapse_lines {
                emit_csv(target, "collapse_lines.csv", &collapse_line_rows(&scene))?;
                let windows = window_rows(&scene);
                if !windows.is_empty() {
                    emit_csv(target, "window.csv", &windows)?;
                }
            }
            if scene.layers.worldlines {
                emit_csv(target, "worldlines.csv", &worldline_rows(&scene))?;
            }
            if scene.layers.events {
                emit_csv(target, "events.csv", &event_rows(&scene))?;
            }
            if scene.layers.light_cones {
                emit_csv(target, "light_cones.csv", &light_cone_rows(&scene))?;
            }
        }
    }
    Ok(())
}

pub fn cmd_regions(cfg: &RunConfig, target: &OutputTarget) -> Result<()> {
    let block = require(&cfg.regions, "regions")?;
    let bounds = block.bounds.to_bounds()?;
    let model = block.model.to_model()?;
    let specs: Vec<_> = block
        .measurements
        .iter()
        .map(|m| m.to_spec())
        .collect::<Result<_>>()?;
    let grid = collapse_geometry::region_map(
        bounds,
        (block.resolution.n_ct, block.resolution.n_x),
        &specs,
        model,
    )
    .map_err(domain_config_error)?;
    emit_csv(target, "regions.csv", &region_rows(&grid))
}
