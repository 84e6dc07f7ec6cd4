//! Turns a diagram config into a frame-agnostic scene: labeled events,
//! clipped line segments, collapse lines, window triangles, and an optional
//! region grid. The CSV and SVG emitters both consume this one structure,
//! so the two outputs can never drift apart.

use anyhow::Result;
use collapse_core::collapse_geometry::{self, Region};
use collapse_core::experiment_planner::{plan, ExperimentPlan};
use collapse_core::spacetime::boost_event;
use collapse_core::{CollapseLine, CollapseModel, Event, GridBounds, MeasurementSpec, RegionGrid};

use crate::config::{DiagramConfig, FrameName, LayerName};
use crate::{config_error, domain_config_error};

#[derive(Clone, Copy, Debug, Default)]
pub struct Layers {
    pub regions: bool,
    pub collapse_lines: bool,
    pub worldlines: bool,
    pub events: bool,
    pub light_cones: bool,
}

impl Layers {
    fn from_names(names: &[LayerName]) -> Layers {
        let mut l = Layers::default();
        for name in names {
            match name {
                LayerName::Regions => l.regions = true,
                LayerName::CollapseLines => l.collapse_lines = true,
                LayerName::Worldlines => l.worldlines = true,
                LayerName::Events => l.events = true,
                LayerName::LightCones => l.light_cones = true,
            }
        }
        l
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Detector,
    Photon,
}

impl SegmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentKind::Detector => "detector",
            SegmentKind::Photon => "photon",
        }
    }
}

/// A drawable straight piece: detector worldlines are clipped to the
/// bounds, photon paths keep their physical endpoints.
#[derive(Clone, Debug)]
pub struct Segment {
    pub label: String,
    pub kind: SegmentKind,
    pub a: Event,
    pub b: Event,
}

#[derive(Clone, Debug)]
pub struct LabeledEvent {
    pub label: String,
    pub event: Event,
}

/// Collapse line of one measurement plus its visible part.
#[derive(Clone, Debug)]
pub struct LineInfo {
    pub detector_id: String,
    pub line: CollapseLine,
    pub visible: Option<(Event, Event)>,
}

/// One past-light-cone branch, drawn from the apex down to the bounds.
#[derive(Clone, Debug)]
pub struct ConeBranch {
    pub label: String,
    pub branch: &'static str,
    pub apex: Event,
    pub end: Event,
}

/// The still-uncollapsed window behind a moving detector: a triangle with
/// the apex at the measurement, closed by the collapse line and the plot
/// edge the line rises toward.
#[derive(Clone, Debug)]
pub struct WindowTriangle {
    pub detector_id: String,
    pub vertices: [Event; 3],
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub frame_label: String,
    pub bounds: GridBounds,
    pub model: CollapseModel,
    pub layers: Layers,
    pub measurements: Vec<MeasurementSpec>,
    pub region_grid: Option<RegionGrid>,
    pub collapse_lines: Vec<LineInfo>,
    pub windows: Vec<WindowTriangle>,
    pub worldlines: Vec<Segment>,
    pub events: Vec<LabeledEvent>,
    pub light_cones: Vec<ConeBranch>,
}

/// Clips the parametric line `p + t * (dct, dx)` for `t` in `[t0, t1]`
/// against the bounds rectangle. `None` when nothing is visible.
pub fn clip_param(
    p: Event,
    dct: f64,
    dx: f64,
    mut t0: f64,
    mut t1: f64,
    b: &GridBounds,
) -> Option<(Event, Event)> {
    let mut axis = |pos: f64, dir: f64, lo: f64, hi: f64| -> bool {
        if dir == 0.0 {
            return pos >= lo && pos <= hi;
        }
        let (ta, tb) = ((lo - pos) / dir, (hi - pos) / dir);
        let (ta, tb) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        t0 <= t1
    };
    if !axis(p.ct, dct, b.ct_min, b.ct_max) || !axis(p.x, dx, b.x_min, b.x_max) {
        return None;
    }
    let at = |t: f64| Event {
        ct: p.ct + t * dct,
        x: p.x + t * dx,
    };
    Some((at(t0), at(t1)))
}

/// Full line through `p` with direction `(dct, dx)`, clipped to bounds.
pub fn clip_line(p: Event, dct: f64, dx: f64, b: &GridBounds) -> Option<(Event, Event)> {
    clip_param(p, dct, dx, f64::NEG_INFINITY, f64::INFINITY, b)
}

fn collapse_line_for(m: &MeasurementSpec, model: CollapseModel) -> Option<CollapseLine> {
    match model {
        // collapse_line() wants the working frame beta, which is minus the
        // detector's velocity in that frame.
        CollapseModel::PreferredFrame => {
            Some(collapse_geometry::collapse_line(m, -m.detector_beta).expect("frames match"))
        }
        CollapseModel::ObserverFrame(beta) => Some(CollapseLine {
            slope: beta,
            anchor: m.event,
            model,
        }),
        // The backward light cone has no straight collapse line; the cone
        // itself lives in the light_cones layer.
        CollapseModel::BackwardLightCone => None,
    }
}

fn window_triangle(
    m: &MeasurementSpec,
    line: &CollapseLine,
    bounds: &GridBounds,
) -> Option<WindowTriangle> {
    if line.slope == 0.0 {
        return None;
    }
    // The window opens on the side where the collapse line rises above the
    // measurement, which is behind the detector's motion.
    let x_edge = if line.slope < 0.0 {
        bounds.x_min
    } else {
        bounds.x_max
    };
    let apex = line.anchor;
    let base = Event {
        ct: apex.ct,
        x: x_edge,
    };
    let tip = Event {
        ct: line.ct_at(x_edge),
        x: x_edge,
    };
    Some(WindowTriangle {
        detector_id: m.detector_id.as_str().to_string(),
        vertices: [apex, base, tip],
    })
}

fn push_measurement_layers(scene: &mut Scene) {
    let bounds = scene.bounds;
    if scene.layers.collapse_lines {
        for m in &scene.measurements {
            if let Some(line) = collapse_line_for(m, scene.model) {
                let visible = clip_line(line.anchor, line.slope, 1.0, &bounds);
                if scene.model == CollapseModel::PreferredFrame {
                    if let Some(w) = window_triangle(m, &line, &bounds) {
                        scene.windows.push(w);
                    }
                }
                scene.collapse_lines.push(LineInfo {
                    detector_id: m.detector_id.as_str().to_string(),
                    line,
                    visible,
                });
            }
        }
    }
    if scene.layers.light_cones {
        for m in &scene.measurements {
            for (branch, dx) in [("past_left", -1.0), ("past_right", 1.0)] {
                if let Some((_, end)) = clip_param(m.event, -1.0, dx, 0.0, f64::INFINITY, &bounds)
                {
                    scene.light_cones.push(ConeBranch {
                        label: m.detector_id.as_str().to_string(),
                        branch,
                        apex: m.event,
                        end,
                    });
                }
            }
        }
    }
}

fn detector_worldline(label: &str, through: Event, beta: f64, bounds: &GridBounds) -> Option<Segment> {
    clip_line(through, 1.0, beta, bounds).map(|(a, b)| Segment {
        label: label.to_string(),
        kind: SegmentKind::Detector,
        a,
        b,
    })
}

/// Scene driven by an explicit measurement list.
pub fn scene_from_measurements(cfg: &DiagramConfig) -> Result<Scene> {
    let bounds = cfg.bounds.to_bounds()?;
    let model = cfg.model.to_model()?;
    let layers = Layers::from_names(&cfg.layers);
    let measurements: Vec<MeasurementSpec> = cfg
        .measurements
        .iter()
        .map(|m| m.to_spec())
        .collect::<Result<_>>()?;

    let mut scene = Scene {
        frame_label: cfg.frame_label.clone().unwrap_or_else(|| "S".to_string()),
        bounds,
        model,
        layers,
        measurements,
        region_grid: None,
        collapse_lines: Vec::new(),
        windows: Vec::new(),
        worldlines: Vec::new(),
        events: Vec::new(),
        light_cones: Vec::new(),
    };

    if layers.regions {
        let grid = collapse_geometry::region_map(
            bounds,
            (cfg.resolution.n_ct, cfg.resolution.n_x),
            &scene.measurements,
            model,
        )
        .map_err(domain_config_error)?;
        scene.region_grid = Some(grid);
    } else if scene.measurements.len() > 2 {
        return Err(config_error(format!(
            "at most 2 measurements are supported, got {}",
            scene.measurements.len()
        )));
    }

    if layers.worldlines {
        for m in &scene.measurements {
            if let Some(seg) =
                detector_worldline(m.detector_id.as_str(), m.event, m.detector_beta, &bounds)
            {
                scene.worldlines.push(seg);
            }
        }
    }
    if layers.events {
        for m in &scene.measurements {
            scene.events.push(LabeledEvent {
                label: m.detector_id.as_str().to_string(),
                event: m.event,
            });
        }
    }
    push_measurement_layers(&mut scene);
    Ok(scene)
}

struct PlanGeometry {
    detection1: Event,
    detection2: Event,
    source: Event,
    point_a: Event,
    beta1: f64,
    beta2: f64,
    frame_label: &'static str,
}

fn plan_geometry(p: &ExperimentPlan, frame: FrameName) -> Result<PlanGeometry> {
    Ok(match frame {
        FrameName::S => PlanGeometry {
            detection1: p.detection1,
            detection2: p.detection2,
            source: p.source,
            point_a: p.point_a,
            beta1: 0.0,
            beta2: p.beta,
            frame_label: "S",
        },
        FrameName::SPrime => {
            let b = p.boost_to_moving();
            let map = |e: Event| boost_event(e, &b).map_err(domain_config_error);
            PlanGeometry {
                detection1: map(p.detection1)?,
                detection2: map(p.detection2)?,
                source: map(p.source)?,
                point_a: map(p.point_a)?,
                beta1: -p.beta,
                beta2: 0.0,
                frame_label: "S'",
            }
        }
    })
}

/// Scene derived from a double-measurement plan, in the lab frame or the
/// second detector's rest frame.
pub fn scene_from_plan(cfg: &DiagramConfig) -> Result<Scene> {
    let plan_cfg = cfg.plan.as_ref().expect("caller checked plan presence");
    let params = plan_cfg.to_params()?;
    let p = plan(&params).map_err(domain_config_error)?;
    let geo = plan_geometry(&p, plan_cfg.frame)?;

    let bounds = cfg.bounds.to_bounds()?;
    let model = cfg.model.to_model()?;
    let layers = Layers::from_names(&cfg.layers);

    let measurements = vec![
        MeasurementSpec::new(
            geo.detection1,
            geo.beta1,
            "D1".into(),
            collapse_geometry::Observable::Polarization,
        )
        .map_err(domain_config_error)?,
        MeasurementSpec::new(
            geo.detection2,
            geo.beta2,
            "D2".into(),
            collapse_geometry::Observable::Polarization,
        )
        .map_err(domain_config_error)?,
    ];

    let mut scene = Scene {
        frame_label: cfg
            .frame_label
            .clone()
            .unwrap_or_else(|| geo.frame_label.to_string()),
        bounds,
        model,
        layers,
        measurements,
        region_grid: None,
        collapse_lines: Vec::new(),
        windows: Vec::new(),
        worldlines: Vec::new(),
        events: Vec::new(),
        light_cones: Vec::new(),
    };

    if layers.regions {
        let grid = collapse_geometry::region_map(
            bounds,
            (cfg.resolution.n_ct, cfg.resolution.n_x),
            &scene.measurements,
            model,
        )
        .map_err(domain_config_error)?;
        scene.region_grid = Some(grid);
    }

    if layers.worldlines {
        if let Some(seg) = detector_worldline("D1", geo.detection1, geo.beta1, &bounds) {
            scene.worldlines.push(seg);
        }
        if let Some(seg) = detector_worldline("D2", geo.detection2, geo.beta2, &bounds) {
            scene.worldlines.push(seg);
        }
        for (label, to) in [("photon_to_D1", geo.detection1), ("photon_to_D2", geo.detection2)] {
            scene.worldlines.push(Segment {
                label: label.to_string(),
                kind: SegmentKind::Photon,
                a: geo.source,
                b: to,
            });
        }
    }
    if layers.events {
        for (label, e) in [
            ("source", geo.source),
            ("detection1", geo.detection1),
            ("point_a", geo.point_a),
            ("detection2", geo.detection2),
        ] {
            scene.events.push(LabeledEvent {
                label: label.to_string(),
                event: e,
            });
        }
    }
    push_measurement_layers(&mut scene);
    Ok(scene)
}

pub fn build_scene(cfg: &DiagramConfig) -> Result<Scene> {
    match (&cfg.plan, cfg.measurements.is_empty()) {
        (Some(_), false) => Err(config_error(
            "diagram takes either a plan block or a measurements list, not both",
        )),
        (Some(_), true) => scene_from_plan(cfg),
        (None, false) => scene_from_measurements(cfg),
        (None, true) => Err(config_error(
            "diagram needs a plan block or at least one measurement",
        )),
    }
}

/// Stable single-character codes for the region CSV; the long label still
/// travels alongside for readers.
pub fn region_code(r: &Region) -> String {
    match r {
        Region::Uncollapsed => "u".to_string(),
        Region::CollapsedBy(id) => format!("c:{}", id.as_str()),
        Region::CollapsedByBoth => "b".to_string(),
    }
}

pub fn region_label(r: &Region) -> String {
    match r {
        Region::Uncollapsed => "uncollapsed".to_string(),
        Region::CollapsedBy(id) => format!("collapsed_by_{}", id.as_str()),
        Region::CollapsedByBoth => "collapsed_by_both".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn diagram_cfg(json: &str) -> DiagramConfig {
        let cfg: RunConfig = serde_json::from_str(json).expect("config parses");
        cfg.diagram.expect("diagram block")
    }

    #[test]
    fn clip_keeps_interior_diagonal() {
        let b = GridBounds::new(0.0, 10.0, -10.0, 10.0).unwrap();
        let (a, z) = clip_line(Event { ct: 5.0, x: 0.0 }, 1.0, 1.0, &b).unwrap();
        // The diagonal through (5, 0) leaves through the corners (0,-5)
        // and (10, 5).
        assert_eq!((a.ct, a.x), (0.0, -5.0));
        assert_eq!((z.ct, z.x), (10.0, 5.0));
    }

    #[test]
    fn clip_rejects_line_outside_bounds() {
        let b = GridBounds::new(0.0, 10.0, -10.0, 10.0).unwrap();
        assert!(clip_line(Event { ct: 50.0, x: 0.0 }, 0.0, 1.0, &b).is_none());
    }

    #[test]
    fn ray_clip_starts_at_apex() {
        let b = GridBounds::new(0.0, 10.0, -10.0, 10.0).unwrap();
        let apex = Event { ct: 4.0, x: 0.0 };
        let (a, z) = clip_param(apex, -1.0, -1.0, 0.0, f64::INFINITY, &b).unwrap();
        assert_eq!((a.ct, a.x), (4.0, 0.0));
        assert_eq!((z.ct, z.x), (0.0, -4.0));
    }

    #[test]
    fn stationary_detector_scene_has_no_window() {
        let cfg = diagram_cfg(
            r#"{
                "schema_version": 1,
                "diagram": {
                    "bounds": {"ct_min_m": 0.0, "ct_max_m": 10.0, "x_min_m": -10.0, "x_max_m": 10.0},
                    "layers": ["regions", "collapse_lines", "worldlines", "events", "light_cones"],
                    "measurements": [
                        {"detector_id": "D1", "ct_m": 5.0, "x_m": 0.0}
                    ]
                }
            }"#,
        );
        let scene = build_scene(&cfg).unwrap();
        assert_eq!(scene.collapse_lines.len(), 1);
        assert_eq!(scene.collapse_lines[0].line.slope, 0.0);
        assert!(scene.windows.is_empty());
        assert_eq!(scene.light_cones.len(), 2);
        let grid = scene.region_grid.as_ref().unwrap();
        assert_eq!(grid.n_ct() * grid.n_x(), 120 * 160);
    }

    #[test]
    fn moving_detector_window_opens_against_motion() {
        let cfg = diagram_cfg(
            r#"{
                "schema_version": 1,
                "diagram": {
                    "bounds": {"ct_min_m": 0.0, "ct_max_m": 10.0, "x_min_m": -10.0, "x_max_m": 10.0},
                    "layers": ["collapse_lines"],
                    "measurements": [
                        {"detector_id": "D", "ct_m": 4.0, "x_m": 0.0, "detector_beta": -0.6}
                    ]
                }
            }"#,
        );
        let scene = build_scene(&cfg).unwrap();
        assert_eq!(scene.windows.len(), 1);
        let [apex, base, tip] = scene.windows[0].vertices;
        assert_eq!((apex.ct, apex.x), (4.0, 0.0));
        assert_eq!((base.ct, base.x), (4.0, -10.0));
        // Slope -0.6 over dx = -10 rises by 6.
        assert_eq!((tip.ct, tip.x), (10.0, -10.0));
    }

    #[test]
    fn plan_scene_in_moving_frame_puts_d2_at_rest() {
        let cfg = diagram_cfg(
            r#"{
                "schema_version": 1,
                "diagram": {
                    "bounds": {"ct_min_m": -30.0, "ct_max_m": 30.0, "x_min_m": -30.0, "x_max_m": 30.0},
                    "layers": ["worldlines", "events", "collapse_lines"],
                    "plan": {
                        "v_m_per_s": 179875474.79999998,
                        "x0_m": -20.0,
                        "t1_s": 3.3356409519815205e-8,
                        "epsilon_s": 4.1695511899769005e-10,
                        "storage_latency_s": 1e-9,
                        "frame": "s_prime"
                    }
                }
            }"#,
        );
        let scene = build_scene(&cfg).unwrap();
        assert_eq!(scene.measurements.len(), 2);
        let d2 = &scene.measurements[1];
        assert_eq!(d2.detector_beta, 0.0);
        // D2 is at its own origin in its rest frame.
        assert!(d2.event.x.abs() < 1e-9, "x' = {}", d2.event.x);
        let d1 = &scene.measurements[0];
        assert!((d1.detector_beta - -0.6).abs() < 1e-12);
        // Photon segments keep physical endpoints even outside bounds.
        assert_eq!(scene.worldlines.len(), 4);
    }

    #[test]
    fn plan_and_measurements_together_are_rejected() {
        let cfg = diagram_cfg(
            r#"{
                "schema_version": 1,
                "diagram": {
                    "bounds": {"ct_min_m": 0.0, "ct_max_m": 1.0, "x_min_m": 0.0, "x_max_m": 1.0},
                    "layers": [],
                    "measurements": [{"detector_id": "D1", "ct_m": 0.5, "x_m": 0.5}],
                    "plan": {
                        "v_m_per_s": 100.0, "x0_m": -90010.0, "t1_s": 0.1,
                        "storage_latency_s": 1e-10, "frame": "s"
                    }
                }
            }"#,
        );
        assert!(build_scene(&cfg).is_err());
    }
}
