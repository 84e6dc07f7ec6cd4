//! Monte Carlo sampling of repeated pair measurements.
//!
//! Two measurement models. `CollapsedSequential`: the first detection
//! projects the entangled polarization state and pins the exact frequency
//! sum, so the partner's outcome is drawn from the conditioned state.
//! `UncollapsedDouble`: both detectors sample an uncollapsed state
//! independently, i.e. polarizations are independent coin flips and
//! frequencies follow the factorized density, wiping out the sum
//! correlation. The observable difference is the point of the experiment:
//! identical marginals, grossly different joint statistics.
//!
//! Reproducibility contract: event k draws from ChaCha8 stream k of the
//! master seed, accumulation runs over fixed 4096-event chunks merged in
//! chunk order, so reports are bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::two_photon_state::{
    energy_sum_residual, final_state, project_polarization, FinalStateRule, Mode, Pol,
    PolarizationState, TwoPhotonAmplitude,
};

/// Identifier of the event-to-random-stream scheme, recorded in reports so
/// regenerated data can be traced to the exact sampling discipline.
pub const RNG_ALGORITHM: &str = "chacha8-stream/v1";

/// Fixed accumulation granularity; partial-sum boundaries must not depend
/// on the worker count or reports would not be reproducible.
const CHUNK_EVENTS: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementModel {
    /// First measurement collapses; second sees the conditioned state.
    CollapsedSequential,
    /// Both measurements see the uncollapsed state independently.
    UncollapsedDouble,
}

/// Which observables each event draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Observables {
    pub polarization: bool,
    pub frequency: bool,
}

impl Default for Observables {
    fn default() -> Self {
        Observables {
            polarization: true,
            frequency: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub model: MeasurementModel,
    pub n_events: u64,
    pub seed: u64,
    pub amplitude: TwoPhotonAmplitude<f64>,
    pub observables: Observables,
    pub final_state_rule: FinalStateRule,
}

impl SimulationConfig {
    pub fn new(model: MeasurementModel, n_events: u64, seed: u64) -> Result<Self> {
        let cfg = SimulationConfig {
            model,
            n_events,
            seed,
            amplitude: TwoPhotonAmplitude::defaults(),
            observables: Observables::default(),
            final_state_rule: FinalStateRule::Outcomes,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_events == 0 {
            return Err(Error::EmptySimulation);
        }
        Ok(())
    }
}

/// One sampled pair event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventSample {
    pub index: u64,
    /// Raw measured (signal, idler) polarizations.
    pub polarizations: Option<(Pol, Pol)>,
    /// Polarizations after the final-state rule.
    pub final_polarizations: Option<(Pol, Pol)>,
    /// (omega_s, omega_i), rad/s.
    pub frequencies: Option<(f64, f64)>,
    /// omega_s + omega_i - omega_p, rad/s.
    pub residual: Option<f64>,
}

/// The dedicated random stream of one event: every event owns stream
/// `index` of the master seed, so sampling event k never depends on how
/// many events ran before it.
pub fn event_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws the (signal, idler) polarization outcomes. Consumes exactly one
/// uniform under `CollapsedSequential` and two under `UncollapsedDouble`.
pub fn sample_polarizations<R: Rng>(model: MeasurementModel, rng: &mut R) -> (Pol, Pol) {
    match model {
        MeasurementModel::CollapsedSequential => {
            // Born rule on the entangled state, then read the partner off
            // the conditioned state, which is a single product term.
            let bell = PolarizationState::<f64>::bell_state();
            let p_v = project_polarization(&bell, Mode::Signal, Pol::V)
                .expect("bell state overlaps V")
                .probability;
            let first = if rng.random::<f64>() < p_v {
                Pol::V
            } else {
                Pol::H
            };
            let outcome =
                project_polarization(&bell, Mode::Signal, first).expect("bell state overlaps both");
            let partner = outcome.post_state.terms()[0].idler;
            (first, partner)
        }
        MeasurementModel::UncollapsedDouble => {
            let mut flip = || {
                if rng.random::<f64>() < 0.5 {
                    Pol::V
                } else {
                    Pol::H
                }
            };
            (flip(), flip())
        }
    }
}

/// Draws (omega_s, omega_i). Two normal draws either way, in a fixed order.
pub fn sample_frequencies<R: Rng>(
    model: MeasurementModel,
    amplitude: &TwoPhotonAmplitude<f64>,
    rng: &mut R,
) -> (f64, f64) {
    match model {
        MeasurementModel::CollapsedSequential => {
            // Exact draw from the correlated density in rotated coordinates:
            // the sum and difference are independent Gaussians.
            let u = Normal::new(amplitude.omega_p(), amplitude.sigma_sum())
                .expect("validated sigma")
                .sample(rng);
            let w = Normal::new(amplitude.delta(), amplitude.sigma_diff())
                .expect("validated sigma")
                .sample(rng);
            (0.5 * (u + w), 0.5 * (u - w))
        }
        MeasurementModel::UncollapsedDouble => {
            let sd = amplitude.marginal_sd();
            let s = Normal::new(amplitude.marginal_mean(Mode::Signal), sd)
                .expect("validated sigma")
                .sample(rng);
            let i = Normal::new(amplitude.marginal_mean(Mode::Idler), sd)
                .expect("validated sigma")
                .sample(rng);
            (s, i)
        }
    }
}

/// Samples one event. Draw order within the stream is polarization first,
/// then frequency; disabling an observable skips its draws entirely.
pub fn sample_event(config: &SimulationConfig, index: u64) -> EventSample {
    let mut rng = event_rng(config.seed, index);
    let polarizations = config
        .observables
        .polarization
        .then(|| sample_polarizations(config.model, &mut rng));
    let final_polarizations =
        polarizations.map(|(s, i)| final_state(config.final_state_rule, s, i));
    let frequencies = config
        .observables
        .frequency
        .then(|| sample_frequencies(config.model, &config.amplitude, &mut rng));
    let residual = frequencies.map(|(s, i)| energy_sum_residual(&config.amplitude, s, i));
    EventSample {
        index,
        polarizations,
        final_polarizations,
        frequencies,
        residual,
    }
}

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Joint polarization tallies in (signal, idler) order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct OutcomeCounts {
    pub vv: u64,
    pub vh: u64,
    pub hv: u64,
    pub hh: u64,
}

impl OutcomeCounts {
    fn add(&mut self, signal: Pol, idler: Pol) {
        match (signal, idler) {
            (Pol::V, Pol::V) => self.vv += 1,
            (Pol::V, Pol::H) => self.vh += 1,
            (Pol::H, Pol::V) => self.hv += 1,
            (Pol::H, Pol::H) => self.hh += 1,
        }
    }

    fn merge(&mut self, o: &OutcomeCounts) {
        self.vv += o.vv;
        self.vh += o.vh;
        self.hv += o.hv;
        self.hh += o.hh;
    }

    pub fn total(&self) -> u64 {
        self.vv + self.vh + self.hv + self.hh
    }

    pub fn same(&self) -> u64 {
        self.vv + self.hh
    }
}

/// Counts of the energy-sum residual over fixed bins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    #[serde(rename = "lo_rad_per_s")]
    pub lo: f64,
    #[serde(rename = "hi_rad_per_s")]
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram {
            lo,
            hi,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    fn add(&mut self, x: f64) {
        if x < self.lo {
            self.underflow += 1;
        } else if x >= self.hi {
            self.overflow += 1;
        } else {
            let f = (x - self.lo) / (self.hi - self.lo) * self.counts.len() as f64;
            let i = (f as usize).min(self.counts.len() - 1);
            self.counts[i] += 1;
        }
    }

    fn merge(&mut self, o: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
        self.underflow += o.underflow;
        self.overflow += o.overflow;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

/// Number of residual histogram bins; the range spans +-5 factorized sum
/// deviations so both models land on comparable axes.
pub const HISTOGRAM_BINS: usize = 41;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizationStats {
    pub outcomes: OutcomeCounts,
    pub final_outcomes: OutcomeCounts,
    /// Probability that signal and idler polarizations agree (raw outcomes).
    pub p_same: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyStats {
    pub mean_omega_s: Estimate,
    pub mean_omega_i: Estimate,
    /// Mean of omega_s + omega_i; centered on omega_p under both models.
    pub mean_sum: Estimate,
    /// Sample standard deviation of omega_s + omega_i; None below 2 events.
    pub sd_sum: Option<Estimate>,
    /// Fraction of events with |energy residual| beyond 3 sigma_sum.
    pub frac_beyond_3_sigma_sum: Estimate,
    pub residual_histogram: Histogram,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub rng_algorithm: String,
    pub polarization: Option<PolarizationStats>,
    pub frequency: Option<FrequencyStats>,
}

/// Per-chunk accumulator. Frequency moments are taken about the analytic
/// means so the compensated sums carry only fluctuations, not the 1e15
/// offsets.
struct ChunkStats {
    n: u64,
    outcomes: OutcomeCounts,
    final_outcomes: OutcomeCounts,
    d_s: KahanSum,
    d_s2: KahanSum,
    d_i: KahanSum,
    d_i2: KahanSum,
    r: KahanSum,
    r2: KahanSum,
    beyond3: u64,
    hist: Histogram,
}

impl ChunkStats {
    fn new(cfg: &SimulationConfig) -> Self {
        let span = 5.0 * cfg.amplitude.sum_sd_factorized();
        ChunkStats {
            n: 0,
            outcomes: OutcomeCounts::default(),
            final_outcomes: OutcomeCounts::default(),
            d_s: KahanSum::new(),
            d_s2: KahanSum::new(),
            d_i: KahanSum::new(),
            d_i2: KahanSum::new(),
            r: KahanSum::new(),
            r2: KahanSum::new(),
            beyond3: 0,
            hist: Histogram::new(-span, span, HISTOGRAM_BINS),
        }
    }

    fn absorb(&mut self, ev: &EventSample, cfg: &SimulationConfig) {
        self.n += 1;
        if let Some((s, i)) = ev.polarizations {
            self.outcomes.add(s, i);
        }
        if let Some((s, i)) = ev.final_polarizations {
            self.final_outcomes.add(s, i);
        }
        if let (Some((omega_s, omega_i)), Some(r)) = (ev.frequencies, ev.residual) {
            let ds = omega_s - cfg.amplitude.marginal_mean(Mode::Signal);
            let di = omega_i - cfg.amplitude.marginal_mean(Mode::Idler);
            self.d_s.add(ds);
            self.d_s2.add(ds * ds);
            self.d_i.add(di);
            self.d_i2.add(di * di);
            self.r.add(r);
            self.r2.add(r * r);
            if r.abs() > 3.0 * cfg.amplitude.sigma_sum() {
                self.beyond3 += 1;
            }
            self.hist.add(r);
        }
    }

    fn merge(&mut self, o: ChunkStats) {
        self.n += o.n;
        self.outcomes.merge(&o.outcomes);
        self.final_outcomes.merge(&o.final_outcomes);
        self.d_s.merge(o.d_s);
        self.d_s2.merge(o.d_s2);
        self.d_i.merge(o.d_i);
        self.d_i2.merge(o.d_i2);
        self.r.merge(o.r);
        self.r2.merge(o.r2);
        self.beyond3 += o.beyond3;
        self.hist.merge(&o.hist);
    }
}

/// Sample mean and standard error from a centered compensated sum.
fn mean_estimate(center: f64, d: &KahanSum, d2: &KahanSum, n: u64) -> Estimate {
    let nf = n as f64;
    let mean_d = d.value() / nf;
    let std_error = match sample_variance(d, d2, n) {
        Some(var) => (var / nf).sqrt(),
        None => 0.0,
    };
    Estimate {
        value: center + mean_d,
        std_error,
    }
}

fn sample_variance(d: &KahanSum, d2: &KahanSum, n: u64) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let var = (d2.value() - d.value() * d.value() / nf) / (nf - 1.0);
    Some(var.max(0.0))
}

/// Runs the full simulation. Deterministic in (config, seed): worker count
/// and scheduling cannot change a single bit of the report.
pub fn run(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let n = config.n_events;
    let n_chunks = n.div_ceil(CHUNK_EVENTS);
    let mut partials: Vec<ChunkStats> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * CHUNK_EVENTS;
            let end = (start + CHUNK_EVENTS).min(n);
            let mut st = ChunkStats::new(config);
            for i in start..end {
                st.absorb(&sample_event(config, i), config);
            }
            st
        })
        .collect();
    // Sequential in-order merge: the reduction tree is part of the result.
    let mut total = partials.remove(0);
    for p in partials {
        total.merge(p);
    }

    let nf = n as f64;
    let polarization = config.observables.polarization.then(|| {
        let p = total.outcomes.same() as f64 / nf;
        PolarizationStats {
            outcomes: total.outcomes,
            final_outcomes: total.final_outcomes,
            p_same: Estimate {
                value: p,
                std_error: (p * (1.0 - p) / nf).sqrt(),
            },
        }
    });
    let frequency = config.observables.frequency.then(|| {
        let amp = &config.amplitude;
        let sd_sum = sample_variance(&total.r, &total.r2, n).map(|var| {
            let sd = var.sqrt();
            Estimate {
                value: sd,
                // Gaussian-family delta method: se(sd) = sd / sqrt(2 (n-1)).
                std_error: sd / (2.0 * (nf - 1.0)).sqrt(),
            }
        });
        let p3 = total.beyond3 as f64 / nf;
        FrequencyStats {
            mean_omega_s: mean_estimate(
                amp.marginal_mean(Mode::Signal),
                &total.d_s,
                &total.d_s2,
                n,
            ),
            mean_omega_i: mean_estimate(
                amp.marginal_mean(Mode::Idler),
                &total.d_i,
                &total.d_i2,
                n,
            ),
            mean_sum: mean_estimate(amp.omega_p(), &total.r, &total.r2, n),
            sd_sum,
            frac_beyond_3_sigma_sum: Estimate {
                value: p3,
                std_error: (p3 * (1.0 - p3) / nf).sqrt(),
            },
            residual_histogram: total.hist,
        }
    });
    Ok(SimulationReport {
        config: config.clone(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        polarization,
        frequency,
    })
}

/// Expected and observed spread of the frequency sum under both models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceComparison {
    #[serde(rename = "expected_sd_collapsed_rad_per_s")]
    pub expected_sd_collapsed: f64,
    #[serde(rename = "expected_sd_uncollapsed_rad_per_s")]
    pub expected_sd_uncollapsed: f64,
    /// (sigma_sum^2 + sigma_diff^2) / (2 sigma_sum^2).
    pub expected_variance_ratio: f64,
    #[serde(rename = "observed_sd_collapsed_rad_per_s")]
    pub observed_sd_collapsed: Option<f64>,
    #[serde(rename = "observed_sd_uncollapsed_rad_per_s")]
    pub observed_sd_uncollapsed: Option<f64>,
    pub observed_variance_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub collapsed: SimulationReport,
    pub uncollapsed: SimulationReport,
    pub variance: VarianceComparison,
}

/// Runs both models with identical n, seed, and amplitude, then compares
/// the spread of the frequency sum.
pub fn compare(config: &SimulationConfig) -> Result<ComparisonReport> {
    let mut collapsed_cfg = config.clone();
    collapsed_cfg.model = MeasurementModel::CollapsedSequential;
    let mut uncollapsed_cfg = config.clone();
    uncollapsed_cfg.model = MeasurementModel::UncollapsedDouble;
    let collapsed = run(&collapsed_cfg)?;
    let uncollapsed = run(&uncollapsed_cfg)?;

    let sd_of = |r: &SimulationReport| {
        r.frequency
            .as_ref()
            .and_then(|f| f.sd_sum.as_ref())
            .map(|e| e.value)
    };
    let observed_sd_collapsed = sd_of(&collapsed);
    let observed_sd_uncollapsed = sd_of(&uncollapsed);
    let amp = &config.amplitude;
    let expected_sd_collapsed = amp.sum_sd_correlated();
    let expected_sd_uncollapsed = amp.sum_sd_factorized();
    let variance = VarianceComparison {
        expected_sd_collapsed,
        expected_sd_uncollapsed,
        expected_variance_ratio: (expected_sd_uncollapsed / expected_sd_collapsed).powi(2),
        observed_sd_collapsed,
        observed_sd_uncollapsed,
        observed_variance_ratio: match (observed_sd_collapsed, observed_sd_uncollapsed) {
            (Some(c), Some(u)) if c > 0.0 => Some((u / c).powi(2)),
            _ => None,
        },
    };
    Ok(ComparisonReport {
        collapsed,
        uncollapsed,
        variance,
    })
}
