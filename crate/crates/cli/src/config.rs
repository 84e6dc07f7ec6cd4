//! JSON run configuration. One file can describe several commands; each
//! command reads only its own block and rejects runs where that block is
//! missing. Every length is in meters, every time in seconds, every angular
//! frequency in rad/s, and the key names carry the unit as a suffix so a
//! config never depends on comments for its meaning.

use std::path::Path;

use anyhow::Result;
use collapse_core::collapse_geometry::{DetectorId, Observable};
use collapse_core::experiment_planner::ExperimentParams;
use collapse_core::simulation::{MeasurementModel, Observables, SimulationConfig};
use collapse_core::two_photon_state::FinalStateRule;
use collapse_core::{Boost, CollapseModel, Event, GridBounds, MeasurementSpec, TwoPhotonAmplitude};
use serde::Deserialize;

use crate::{config_error, domain_config_error};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub transform: Option<TransformConfig>,
    #[serde(default)]
    pub plan: Option<PlanConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub diagram: Option<DiagramConfig>,
    #[serde(default)]
    pub regions: Option<RegionsConfig>,
}

impl RunConfig {
    /// Reads and parses a config file. Syntax and schema violations are
    /// reported with the line and column from the JSON parser; an unreadable
    /// path counts as a config problem too.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config file {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
            config_error(format!(
                "{} at line {} column {}: {}",
                path.display(),
                e.line(),
                e.column(),
                e
            ))
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_error(format!(
                "unsupported schema_version {} (this build reads version {})",
                cfg.schema_version, SCHEMA_VERSION
            )));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostConfig {
    pub beta: f64,
    #[serde(default)]
    pub ct_offset_m: f64,
    #[serde(default)]
    pub x_offset_m: f64,
}

impl BoostConfig {
    pub fn to_boost(self) -> Result<Boost> {
        Boost::with_offsets(self.beta, self.ct_offset_m, self.x_offset_m)
            .map_err(domain_config_error)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub ct_m: f64,
    pub x_m: f64,
}

impl EventConfig {
    pub fn to_event(self) -> Result<Event> {
        Event::new(self.ct_m, self.x_m).map_err(domain_config_error)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformDirection {
    Forward,
    Inverse,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub boost: BoostConfig,
    pub direction: TransformDirection,
    pub events: Vec<EventConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub v_m_per_s: f64,
    pub x0_m: f64,
    pub t1_s: f64,
    #[serde(default)]
    pub epsilon_s: f64,
    pub storage_latency_s: f64,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl PlanConfig {
    pub fn to_params(&self) -> Result<ExperimentParams> {
        build_params(
            self.v_m_per_s,
            self.x0_m,
            self.t1_s,
            self.epsilon_s,
            self.storage_latency_s,
        )
    }
}

pub fn build_params(
    v: f64,
    x0: f64,
    t1: f64,
    epsilon: f64,
    storage_latency: f64,
) -> Result<ExperimentParams> {
    let params = ExperimentParams {
        v,
        x0,
        t1,
        epsilon,
        storage_latency,
    };
    params.validate().map_err(domain_config_error)?;
    Ok(params)
}

/// Inclusive linear range with an explicit sample count. `count == 1`
/// evaluates only `min`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(config_error("sweep axis count must be at least 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(config_error("sweep axis bounds must be finite"));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect())
    }
}

/// Axes missing from the sweep stay fixed at the scalar value in the plan
/// block. Rows are emitted in nested order with `v_m_per_s` outermost and
/// `epsilon_s` innermost.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub v_m_per_s: Option<SweepAxis>,
    #[serde(default)]
    pub x0_m: Option<SweepAxis>,
    #[serde(default)]
    pub t1_s: Option<SweepAxis>,
    #[serde(default)]
    pub epsilon_s: Option<SweepAxis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimModelName {
    CollapsedSequential,
    UncollapsedDouble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableName {
    Polarization,
    Frequency,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalStateRuleName {
    Outcomes,
    D1Priority,
    D2Priority,
}

impl FinalStateRuleName {
    pub fn to_rule(self) -> FinalStateRule {
        match self {
            FinalStateRuleName::Outcomes => FinalStateRule::Outcomes,
            FinalStateRuleName::D1Priority => FinalStateRule::D1Priority,
            FinalStateRuleName::D2Priority => FinalStateRule::D2Priority,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeConfig {
    pub omega_p_rad_per_s: f64,
    pub sigma_sum_rad_per_s: f64,
    pub sigma_diff_rad_per_s: f64,
    #[serde(default)]
    pub delta_rad_per_s: f64,
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        AmplitudeConfig {
            omega_p_rad_per_s: 2.4e15,
            sigma_sum_rad_per_s: 1.0e12,
            sigma_diff_rad_per_s: 2.0e13,
            delta_rad_per_s: 0.0,
        }
    }
}

impl AmplitudeConfig {
    pub fn to_amplitude(self) -> Result<TwoPhotonAmplitude> {
        TwoPhotonAmplitude::new(
            self.omega_p_rad_per_s,
            self.sigma_sum_rad_per_s,
            self.sigma_diff_rad_per_s,
            self.delta_rad_per_s,
        )
        .map_err(domain_config_error)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: SimModelName,
    pub n_events: u64,
    pub seed: u64,
    #[serde(default)]
    pub amplitude: AmplitudeConfig,
    /// Observables to sample; both when omitted.
    #[serde(default)]
    pub observables: Option<Vec<ObservableName>>,
    #[serde(default = "default_final_state_rule")]
    pub final_state_rule: FinalStateRuleName,
    /// With an output directory, also write one CSV row per event.
    #[serde(default)]
    pub export_events: bool,
}

fn default_final_state_rule() -> FinalStateRuleName {
    FinalStateRuleName::Outcomes
}

impl SimulateConfig {
    pub fn to_sim_config(&self, seed_override: Option<u64>) -> Result<SimulationConfig> {
        let model = match self.model {
            SimModelName::CollapsedSequential => MeasurementModel::CollapsedSequential,
            SimModelName::UncollapsedDouble => MeasurementModel::UncollapsedDouble,
        };
        let mut cfg =
            SimulationConfig::new(model, self.n_events, seed_override.unwrap_or(self.seed))
                .map_err(domain_config_error)?;
        cfg.amplitude = self.amplitude.to_amplitude()?;
        cfg.observables = match &self.observables {
            None => Observables::default(),
            Some(list) => Observables {
                polarization: list.contains(&ObservableName::Polarization),
                frequency: list.contains(&ObservableName::Frequency),
            },
        };
        cfg.final_state_rule = self.final_state_rule.to_rule();
        Ok(cfg)
    }
}

/// Collapse model selector. Unit variants are written as plain strings,
/// the observer frame carries its beta: `"preferred_frame"` or
/// `{"observer_frame": 0.3}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    PreferredFrame,
    BackwardLightCone,
    ObserverFrame(f64),
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::PreferredFrame
    }
}

impl ModelConfig {
    pub fn to_model(self) -> Result<CollapseModel> {
        let model = match self {
            ModelConfig::PreferredFrame => CollapseModel::PreferredFrame,
            ModelConfig::BackwardLightCone => CollapseModel::BackwardLightCone,
            ModelConfig::ObserverFrame(beta) => CollapseModel::ObserverFrame(beta),
        };
        model.validate().map_err(domain_config_error)?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramObservable {
    Polarization,
    Frequency,
    None,
}

impl DiagramObservable {
    fn to_observable(self) -> Observable {
        match self {
            DiagramObservable::Polarization => Observable::Polarization,
            DiagramObservable::Frequency => Observable::Frequency,
            DiagramObservable::None => Observable::None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    pub detector_id: String,
    pub ct_m: f64,
    pub x_m: f64,
    /// Detector velocity in the diagram frame, as a fraction of c.
    #[serde(default)]
    pub detector_beta: f64,
    #[serde(default = "default_diagram_observable")]
    pub observable: DiagramObservable,
}

fn default_diagram_observable() -> DiagramObservable {
    DiagramObservable::None
}

impl MeasurementConfig {
    pub fn to_spec(&self) -> Result<MeasurementSpec> {
        MeasurementSpec::new(
            Event::new(self.ct_m, self.x_m).map_err(domain_config_error)?,
            self.detector_beta,
            DetectorId::new(self.detector_id.clone()),
            self.observable.to_observable(),
        )
        .map_err(domain_config_error)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub ct_min_m: f64,
    pub ct_max_m: f64,
    pub x_min_m: f64,
    pub x_max_m: f64,
}

impl BoundsConfig {
    pub fn to_bounds(self) -> Result<GridBounds> {
        GridBounds::new(self.ct_min_m, self.ct_max_m, self.x_min_m, self.x_max_m)
            .map_err(domain_config_error)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    pub n_ct: usize,
    pub n_x: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerName {
    Regions,
    CollapseLines,
    Worldlines,
    Events,
    LightCones,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    S,
    SPrime,
}

/// Plan-driven diagram source: derive the scene from the planner output
/// instead of listing measurements by hand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramPlanConfig {
    pub v_m_per_s: f64,
    pub x0_m: f64,
    pub t1_s: f64,
    #[serde(default)]
    pub epsilon_s: f64,
    pub storage_latency_s: f64,
    pub frame: FrameName,
}

impl DiagramPlanConfig {
    pub fn to_params(&self) -> Result<ExperimentParams> {
        build_params(
            self.v_m_per_s,
            self.x0_m,
            self.t1_s,
            self.epsilon_s,
            self.storage_latency_s,
        )
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramConfig {
    pub bounds: BoundsConfig,
    #[serde(default = "default_resolution")]
    pub resolution: ResolutionConfig,
    pub layers: Vec<LayerName>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub frame_label: Option<String>,
    #[serde(default)]
    pub measurements: Vec<MeasurementConfig>,
    #[serde(default)]
    pub plan: Option<DiagramPlanConfig>,
}

fn default_resolution() -> ResolutionConfig {
    ResolutionConfig { n_ct: 120, n_x: 160 }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    pub bounds: BoundsConfig,
    pub resolution: ResolutionConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub measurements: Vec<MeasurementConfig>,
}
