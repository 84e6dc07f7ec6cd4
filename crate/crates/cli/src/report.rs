//! Human-readable summaries and their JSON twins. Text reports use Rust's
//! shortest-round-trip float formatting, so nothing is lost to rounding
//! and identical runs print identical bytes.

use anyhow::Result;
use collapse_core::experiment_planner::ExperimentPlan;
use collapse_core::simulation::{
    ComparisonReport, Estimate, Histogram, MeasurementModel, SimulationReport,
};
use collapse_core::Event;
use serde::Serialize;
use std::fmt::Write;

fn evt(e: Event) -> String {
    format!("(ct {:?} m, x {:?} m)", e.ct, e.x)
}

fn est(e: &Estimate) -> String {
    format!("{:?} (se {:?})", e.value, e.std_error)
}

pub fn json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn plan_text(p: &ExperimentPlan) -> String {
    let mut o = String::new();
    writeln!(o, "double measurement plan").unwrap();
    writeln!(o, "  inputs").unwrap();
    writeln!(o, "    v:                  {:?} m/s", p.params.v).unwrap();
    writeln!(o, "    x0:                 {:?} m", p.params.x0).unwrap();
    writeln!(o, "    t1:                 {:?} s", p.params.t1).unwrap();
    writeln!(o, "    epsilon:            {:?} s", p.params.epsilon).unwrap();
    writeln!(o, "    storage latency:    {:?} s", p.params.storage_latency).unwrap();
    writeln!(o, "  geometry in S").unwrap();
    writeln!(o, "    beta:               {:?}", p.beta).unwrap();
    writeln!(o, "    gamma:              {:?}", p.gamma).unwrap();
    writeln!(o, "    detection1:         {}", evt(p.detection1)).unwrap();
    writeln!(o, "    point A:            {}", evt(p.point_a)).unwrap();
    writeln!(o, "    detection2:         {}", evt(p.detection2)).unwrap();
    writeln!(o, "    source:             {}", evt(p.source)).unwrap();
    writeln!(o, "    dx12:               {:?} m", p.dx12).unwrap();
    writeln!(o, "  geometry in S'").unwrap();
    writeln!(o, "    x1':                {:?} m", p.x1_prime).unwrap();
    writeln!(o, "    ct1':               {:?} m", p.ct1_prime).unwrap();
    writeln!(o, "  window").unwrap();
    writeln!(o, "    rest frame:         {:?} s", p.window_rest).unwrap();
    writeln!(o, "    first order:        {:?} s", p.window_rest_first_order).unwrap();
    writeln!(o, "    moving frame:       {:?} s", p.window_moving).unwrap();
    writeln!(o, "    epsilon (moving):   {:?} s", p.epsilon_moving).unwrap();
    writeln!(o, "    margin:             {:?} s", p.window_margin).unwrap();
    writeln!(o, "  feasibility").unwrap();
    writeln!(
        o,
        "    feasible:           {}",
        if p.feasibility.feasible { "yes" } else { "no" }
    )
    .unwrap();
    if !p.feasibility.reasons.is_empty() {
        let reasons: Vec<String> = p.feasibility.reasons.iter().map(|r| r.to_string()).collect();
        writeln!(o, "    reasons:            {}", reasons.join(", ")).unwrap();
    }
    writeln!(
        o,
        "    required v*dx12:    {:?} m^2/s",
        p.feasibility.required_product
    )
    .unwrap();
    match p.feasibility.required_dx12 {
        Some(d) => writeln!(o, "    required dx12:      {:?} m", d).unwrap(),
        None => writeln!(o, "    required dx12:      n/a (v = 0)").unwrap(),
    }
    writeln!(o, "  identity residuals").unwrap();
    writeln!(
        o,
        "    worldline/lightlike max: {:?} m",
        p.residuals
            .a_on_worldline_m
            .abs()
            .max(p.residuals.detection2_on_worldline_m.abs())
            .max(p.residuals.photon_to_d1_lightlike_m.abs())
            .max(p.residuals.photon_to_d2_lightlike_m.abs())
    )
    .unwrap();
    writeln!(o, "    window identity:    {:?}", p.residuals.window_identity_rel).unwrap();
    writeln!(o, "    frame transform:    {:?}", p.residuals.frame_transform_rel).unwrap();
    writeln!(o, "    time dilation:      {:?}", p.residuals.dilation_rel).unwrap();
    o
}

fn model_name(m: MeasurementModel) -> &'static str {
    match m {
        MeasurementModel::CollapsedSequential => "collapsed_sequential",
        MeasurementModel::UncollapsedDouble => "uncollapsed_double",
    }
}

fn histogram_line(h: &Histogram) -> String {
    format!(
        "{} bins over [{:?}, {:?}] rad/s, {} in range, {} under, {} over",
        h.counts.len(),
        h.lo,
        h.hi,
        h.total(),
        h.underflow,
        h.overflow
    )
}

pub fn sim_text(r: &SimulationReport) -> String {
    let mut o = String::new();
    writeln!(o, "simulation report").unwrap();
    writeln!(o, "  model:              {}", model_name(r.config.model)).unwrap();
    writeln!(o, "  events:             {}", r.config.n_events).unwrap();
    writeln!(o, "  seed:               {}", r.config.seed).unwrap();
    writeln!(o, "  rng:                {}", r.rng_algorithm).unwrap();
    if let Some(p) = &r.polarization {
        writeln!(o, "  polarization").unwrap();
        writeln!(
            o,
            "    outcomes VV VH HV HH: {} {} {} {}",
            p.outcomes.vv, p.outcomes.vh, p.outcomes.hv, p.outcomes.hh
        )
        .unwrap();
        writeln!(
            o,
            "    final    VV VH HV HH: {} {} {} {}",
            p.final_outcomes.vv, p.final_outcomes.vh, p.final_outcomes.hv, p.final_outcomes.hh
        )
        .unwrap();
        writeln!(o, "    p(same polarization): {}", est(&p.p_same)).unwrap();
    }
    if let Some(f) = &r.frequency {
        writeln!(o, "  frequency [rad/s]").unwrap();
        writeln!(o, "    mean omega_s:       {}", est(&f.mean_omega_s)).unwrap();
        writeln!(o, "    mean omega_i:       {}", est(&f.mean_omega_i)).unwrap();
        writeln!(o, "    mean sum:           {}", est(&f.mean_sum)).unwrap();
        match &f.sd_sum {
            Some(sd) => writeln!(o, "    sd of sum:          {}", est(sd)).unwrap(),
            None => writeln!(o, "    sd of sum:          n/a (fewer than 2 events)").unwrap(),
        }
        writeln!(
            o,
            "    beyond 3 sigma_sum: {}",
            est(&f.frac_beyond_3_sigma_sum)
        )
        .unwrap();
        writeln!(o, "    residual histogram: {}", histogram_line(&f.residual_histogram)).unwrap();
    }
    o
}

pub fn compare_text(c: &ComparisonReport) -> String {
    let mut o = String::new();
    o.push_str(&sim_text(&c.collapsed));
    o.push_str(&sim_text(&c.uncollapsed));
    writeln!(o, "model comparison (sd of omega_s + omega_i)").unwrap();
    writeln!(
        o,
        "  expected collapsed / uncollapsed sd: {:?} / {:?} rad/s",
        c.variance.expected_sd_collapsed, c.variance.expected_sd_uncollapsed
    )
    .unwrap();
    writeln!(
        o,
        "  expected variance ratio:             {:?}",
        c.variance.expected_variance_ratio
    )
    .unwrap();
    match (c.variance.observed_sd_collapsed, c.variance.observed_sd_uncollapsed) {
        (Some(sc), Some(su)) => {
            writeln!(o, "  observed collapsed / uncollapsed sd: {:?} / {:?} rad/s", sc, su)
                .unwrap();
        }
        _ => writeln!(o, "  observed sds:                        n/a").unwrap(),
    }
    match c.variance.observed_variance_ratio {
        Some(ratio) => writeln!(o, "  observed variance ratio:             {:?}", ratio).unwrap(),
        None => writeln!(o, "  observed variance ratio:             n/a").unwrap(),
    }
    o
}
