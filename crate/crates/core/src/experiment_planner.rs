//! Placement of a photon-pair source and two detectors so that the second
//! detector meets its photon while the pair state is still uncollapsed.
//!
//! Geometry, all in the lab frame S. Detector D1 rests at x = 0 and absorbs
//! its photon at lab time T1. Detector D2 moves along x(t) = v t + x0 away
//! from D1 (v > 0, x0 < 0 in the intended arrangement). D1's measurement
//! collapses the state along D1's simultaneity line t = T1; D2, rushing
//! toward negative detector-frame times, crosses that line at point A and
//! stays on the uncollapsed side until then. Catching its photon a little
//! earlier than A (that slack is epsilon, applied on the far side) gives a
//! usable window; the source is then placed where the two photon worldlines
//! cross, and the whole arrangement is checked for self-consistency.
//!
//! The window T1 - T_A collapses catastrophically if computed as a literal
//! subtraction (at v = 100 m/s it is 14 orders below T1), so production
//! values come from the cancellation-free product form and a double-double
//! evaluation of the literal form guards the identity in `residuals`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Dd;
use crate::spacetime::{stable_gamma_quantities, Boost, Event, C_M_PER_S};

/// Lab time D1 needs to park its photon in a quantum memory; the default is
/// a round 100 ps.
pub const DEFAULT_STORAGE_LATENCY_S: f64 = 1e-10;

/// Input knobs of the arrangement. Constructed through [`ExperimentParams::new`],
/// which pins the invariants; the fields stay public for reading.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentParams {
    /// D2 velocity in the lab frame, m/s. Non-negative and below c.
    #[serde(rename = "v_m_per_s")]
    pub v: f64,
    /// D2 position at lab time zero, meters.
    #[serde(rename = "x0_m")]
    pub x0: f64,
    /// Lab time of D1's detection, seconds.
    #[serde(rename = "t1_s")]
    pub t1: f64,
    /// Extra lab-frame delay of D2's detection past point A, seconds.
    #[serde(rename = "epsilon_s")]
    pub epsilon: f64,
    /// Minimum lab-frame window D1 needs to resolve and store, seconds.
    #[serde(rename = "storage_latency_s")]
    pub storage_latency: f64,
}

impl ExperimentParams {
    pub fn new(v: f64, x0: f64, t1: f64) -> Result<Self> {
        let p = ExperimentParams {
            v,
            x0,
            t1,
            epsilon: 0.0,
            storage_latency: DEFAULT_STORAGE_LATENCY_S,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_storage_latency(mut self, storage_latency: f64) -> Result<Self> {
        self.storage_latency = storage_latency;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (what, value) in [
            ("v", self.v),
            ("x0", self.x0),
            ("t1", self.t1),
            ("epsilon", self.epsilon),
            ("storage_latency", self.storage_latency),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { what });
            }
        }
        if self.v < 0.0 || self.v >= C_M_PER_S {
            return Err(Error::InvalidParams("v must satisfy 0 <= v < c"));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidParams("epsilon must be non-negative"));
        }
        if self.storage_latency < 0.0 {
            return Err(Error::InvalidParams("storage_latency must be non-negative"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        self.v / C_M_PER_S
    }
}

/// D2's straight worldline x = beta ct + x0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectorWorldline {
    pub beta: f64,
    #[serde(rename = "x0_m")]
    pub x0: f64,
}

impl DetectorWorldline {
    pub fn x_at(&self, ct: f64) -> f64 {
        self.beta * ct + self.x0
    }

    pub fn event_at_t(&self, t: f64) -> Event<f64> {
        let ct = C_M_PER_S * t;
        Event {
            ct,
            x: self.x_at(ct),
        }
    }
}

/// Why an arrangement cannot work as given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibilityReason {
    /// D2 is not ahead of D1 against the motion: the D1-to-D2 separation at
    /// the first detection is not positive, so no window opens at all.
    DetectorOrdering,
    /// The window minus the epsilon delay is shorter than the storage
    /// latency D1 needs.
    InsufficientWindow,
    /// The implied source emission does not precede both detections.
    EmissionGeometry,
}

impl std::fmt::Display for InfeasibilityReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InfeasibilityReason::DetectorOrdering => "detector_ordering",
            InfeasibilityReason::InsufficientWindow => "insufficient_window",
            InfeasibilityReason::EmissionGeometry => "emission_geometry",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub reasons: Vec<InfeasibilityReason>,
    /// v * dx12 needed to clear the storage latency at epsilon = 0,
    /// first order in beta; m^2/s.
    #[serde(rename = "required_product_m2_per_s")]
    pub required_product: f64,
    /// Separation at first detection needed to clear the storage latency,
    /// first order in beta; None when v = 0 (no separation suffices).
    #[serde(rename = "required_dx12_m")]
    pub required_dx12: Option<f64>,
}

/// Self-check residuals of a computed plan. The linear and lightlike ones
/// are absolute (meters); the remaining ones are relative, with the window
/// identity and frame transform evaluated in double-double arithmetic since
/// their f64 forms cancel to nothing at realistic parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// Point A against D2's worldline, m.
    pub a_on_worldline_m: f64,
    /// Second detection against D2's worldline, m.
    pub detection2_on_worldline_m: f64,
    /// Null defect of the source-to-D1 photon segment, m.
    pub photon_to_d1_lightlike_m: f64,
    /// Null defect of the source-to-D2 photon segment, m.
    pub photon_to_d2_lightlike_m: f64,
    /// (cT1 - cT_A) versus gamma^2 beta dx12, relative, double-double.
    pub window_identity_rel: f64,
    /// cT_A versus gamma * cT1', relative, double-double.
    pub frame_transform_rel: f64,
    /// gamma * (moving-frame window) versus the rest-frame window, relative.
    pub dilation_rel: f64,
}

impl IdentityResiduals {
    pub fn max_abs(&self) -> f64 {
        [
            self.a_on_worldline_m,
            self.detection2_on_worldline_m,
            self.photon_to_d1_lightlike_m,
            self.photon_to_d2_lightlike_m,
            self.window_identity_rel,
            self.frame_transform_rel,
            self.dilation_rel,
        ]
        .into_iter()
        .fold(0.0, |a, r| a.max(r.abs()))
    }
}

/// Full arrangement: every event of the protocol, the window in both frames,
/// the feasibility verdict, and the self-check residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentPlan {
    pub params: ExperimentParams,
    pub beta: f64,
    pub gamma: f64,
    /// gamma^2 - 1, cancellation-free.
    pub gamma2_m1: f64,
    /// D1's detection (cT1, 0).
    pub detection1: Event<f64>,
    /// Where D2 crosses D1's collapse line.
    pub point_a: Event<f64>,
    /// D2's detection, epsilon past point A along the worldline.
    pub detection2: Event<f64>,
    /// Photon-pair emission: intersection of the two photon worldlines.
    pub source: Event<f64>,
    /// Signed D1-to-D2 separation at the first detection, m.
    #[serde(rename = "dx12_m")]
    pub dx12: f64,
    /// D1's detection position in the moving frame, m.
    #[serde(rename = "x1_prime_m")]
    pub x1_prime: f64,
    /// D1's detection time in the moving frame, as ct' in m.
    #[serde(rename = "ct1_prime_m")]
    pub ct1_prime: f64,
    /// Uncollapsed window T1 - T_A in the lab frame, s.
    #[serde(rename = "window_rest_s")]
    pub window_rest: f64,
    /// First-order (in beta) window v dx12 / c^2, s.
    #[serde(rename = "window_rest_first_order_s")]
    pub window_rest_first_order: f64,
    /// The same window in D2's frame, shorter by gamma, s.
    #[serde(rename = "window_moving_s")]
    pub window_moving: f64,
    /// The epsilon delay as D2 experiences it, s.
    #[serde(rename = "epsilon_moving_s")]
    pub epsilon_moving: f64,
    /// window_rest - epsilon - storage_latency, s.
    #[serde(rename = "window_margin_s")]
    pub window_margin: f64,
    pub feasibility: Feasibility,
    pub residuals: IdentityResiduals,
}

impl ExperimentPlan {
    /// Boost from the lab frame to D2's rest frame, with offsets chosen so
    /// both frame origins coincide at D2's position at lab time zero.
    pub fn boost_to_moving(&self) -> Boost<f64> {
        Boost::with_offsets(
            self.beta,
            self.gamma * self.beta * self.params.x0,
            -self.gamma * self.params.x0,
        )
        .expect("plan parameters were validated")
    }
}

/// Everything the individual ops share, computed once.
struct Derived {
    beta: f64,
    gamma: f64,
    gamma2_m1: f64,
    ct1: f64,
    dx12: f64,
    point_a: Event<f64>,
    detection2: Event<f64>,
    source: Event<f64>,
    window_rest: f64,
}

fn derive(p: &ExperimentParams) -> Result<Derived> {
    p.validate()?;
    let beta = p.beta();
    let (gamma, _, gamma2_m1) = stable_gamma_quantities(beta)?;
    let gamma2 = 1.0 + gamma2_m1;
    let ct1 = C_M_PER_S * p.t1;
    let dx12 = -p.x0 - p.v * p.t1;
    // A = gamma^2 (cT1 + beta x0, beta cT1 + x0): D2's crossing of the
    // t = T1 simultaneity line, from solving x = beta ct + x0 against
    // ct - (x - 0) beta = cT1... i.e. the line ct = cT1 in D1 time pulled
    // onto D2's worldline.
    let point_a = Event {
        ct: gamma2 * (ct1 + beta * p.x0),
        x: gamma2 * (beta * ct1 + p.x0),
    };
    let c_eps = C_M_PER_S * p.epsilon;
    let detection2 = Event {
        ct: point_a.ct + c_eps,
        x: point_a.x + beta * c_eps,
    };
    // Source at the crossing of the rightward photon into D1's detection
    // and the leftward photon into D2's detection.
    let sum2 = detection2.x + detection2.ct;
    let source = Event {
        ct: 0.5 * (sum2 + ct1),
        x: 0.5 * (sum2 - ct1),
    };
    // T1 - T_A = gamma^2 beta dx12 / c, exactly; never the literal
    // subtraction, which loses 7 digits at beta ~ 3e-7.
    let window_rest = gamma2 * beta * dx12 / C_M_PER_S;
    Ok(Derived {
        beta,
        gamma,
        gamma2_m1,
        ct1,
        dx12,
        point_a,
        detection2,
        source,
        window_rest,
    })
}

pub fn detector2_worldline(p: &ExperimentParams) -> Result<DetectorWorldline> {
    p.validate()?;
    Ok(DetectorWorldline {
        beta: p.beta(),
        x0: p.x0,
    })
}

/// Where D2 crosses D1's collapse line (the last uncollapsed instant on
/// D2's worldline).
pub fn point_a(p: &ExperimentParams) -> Result<Event<f64>> {
    Ok(derive(p)?.point_a)
}

/// D2's detection event, epsilon past point A.
pub fn detection2_event(p: &ExperimentParams) -> Result<Event<f64>> {
    Ok(derive(p)?.detection2)
}

/// Photon-pair emission event implied by the two detections.
pub fn source_placement(p: &ExperimentParams) -> Result<Event<f64>> {
    Ok(derive(p)?.source)
}

pub fn feasibility(p: &ExperimentParams) -> Result<Feasibility> {
    let d = derive(p)?;
    let mut reasons = Vec::new();
    if !(d.dx12 > 0.0) {
        reasons.push(InfeasibilityReason::DetectorOrdering);
    }
    if d.window_rest - p.epsilon < p.storage_latency {
        reasons.push(InfeasibilityReason::InsufficientWindow);
    }
    if !(d.source.ct < d.detection2.ct && d.source.ct < d.ct1) {
        reasons.push(InfeasibilityReason::EmissionGeometry);
    }
    let required_product = C_M_PER_S * C_M_PER_S * p.storage_latency;
    let required_dx12 = if p.v > 0.0 {
        Some(required_product / p.v)
    } else {
        None
    };
    Ok(Feasibility {
        feasible: reasons.is_empty(),
        reasons,
        required_product,
        required_dx12,
    })
}

pub fn plan(p: &ExperimentParams) -> Result<ExperimentPlan> {
    let d = derive(p)?;
    let feasibility = feasibility(p)?;
    let x1_prime = d.gamma * d.dx12;
    let ct1_prime = d.gamma * (d.ct1 + d.beta * p.x0);
    let window_moving = d.window_rest / d.gamma;
    let residuals = residuals(p, &d, window_moving);
    Ok(ExperimentPlan {
        params: *p,
        beta: d.beta,
        gamma: d.gamma,
        gamma2_m1: d.gamma2_m1,
        detection1: Event { ct: d.ct1, x: 0.0 },
        point_a: d.point_a,
        detection2: d.detection2,
        source: d.source,
        dx12: d.dx12,
        x1_prime,
        ct1_prime,
        window_rest: d.window_rest,
        window_rest_first_order: p.v * d.dx12 / (C_M_PER_S * C_M_PER_S),
        window_moving,
        epsilon_moving: p.epsilon / d.gamma,
        window_margin: d.window_rest - p.epsilon - p.storage_latency,
        feasibility,
        residuals,
    })
}

fn residuals(p: &ExperimentParams, d: &Derived, window_moving: f64) -> IdentityResiduals {
    let on_worldline = |e: Event<f64>| e.x - (d.beta * e.ct + p.x0);
    let photon_to_d1 = (d.ct1 - d.source.ct) - (0.0 - d.source.x);
    let photon_to_d2 = (d.detection2.ct - d.source.ct) - (d.source.x - d.detection2.x);

    // Double-double replay of the window identity: the literal difference
    // cT1 - cT_A must reproduce gamma^2 beta dx12 once enough precision is
    // available to survive the cancellation.
    let c = Dd::new(C_M_PER_S);
    let beta = Dd::new(p.v).div(c);
    let one = Dd::new(1.0);
    let gamma2 = one.div(one.sub(beta.mul(beta)));
    let gamma = gamma2.sqrt();
    let ct1 = c.mul(Dd::new(p.t1));
    let x0 = Dd::new(p.x0);
    let cta = gamma2.mul(ct1.add(beta.mul(x0)));
    let dx12 = x0.neg().sub(beta.mul(ct1));
    let cdtc = gamma2.mul(beta).mul(dx12);
    let window_defect = ct1.sub(cta).sub(cdtc).value().abs();
    let window_identity_rel = window_defect / cdtc.abs().value().max(f64::MIN_POSITIVE);

    let ct1_prime = gamma.mul(ct1.add(beta.mul(x0)));
    let transform_defect = cta.sub(gamma.mul(ct1_prime)).value().abs();
    let frame_transform_rel = transform_defect / cta.abs().value().max(1.0);

    let dilation_defect = (d.gamma * window_moving - d.window_rest).abs();
    let dilation_rel = dilation_defect / d.window_rest.abs().max(f64::MIN_POSITIVE);

    IdentityResiduals {
        a_on_worldline_m: on_worldline(d.point_a),
        detection2_on_worldline_m: on_worldline(d.detection2),
        photon_to_d1_lightlike_m: photon_to_d1,
        photon_to_d2_lightlike_m: photon_to_d2,
        window_identity_rel,
        frame_transform_rel,
        dilation_rel,
    }
}
