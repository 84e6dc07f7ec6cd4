//! Polarization and frequency structure of one photon pair.
//!
//! Polarization lives in a tiny term-list Hilbert space: a state is a sum of
//! |signal idler> product terms with complex coefficients, and a projective
//! measurement keeps the matching terms and renormalizes. The frequency side
//! is a two-Gaussian joint density over (omega_s, omega_i): tightly
//! anti-correlated in the sum (pump linewidth sigma_sum) and broad in the
//! difference (phase matching sigma_diff). Losing the sum correlation while
//! keeping both marginals yields the factorized comparison density.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{from_f64, Scalar};

/// Tolerance on |norm^2 - 1| for calling a state normalized.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub fn orthogonal(self) -> Pol {
        match self {
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pol::H => "H",
            Pol::V => "V",
        }
    }
}

/// Which photon of the pair a measurement addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Signal,
    Idler,
}

/// One product term c |signal idler>.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term<F> {
    pub coeff: Complex<F>,
    pub signal: Pol,
    pub idler: Pol,
}

impl<F: Scalar> Term<F> {
    fn pol(&self, mode: Mode) -> Pol {
        match mode {
            Mode::Signal => self.signal,
            Mode::Idler => self.idler,
        }
    }
}

/// Normalized two-photon polarization state as a list of product terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationState<F> {
    terms: Vec<Term<F>>,
}

impl<F: Scalar> PolarizationState<F> {
    /// Accepts only states normalized within [`NORM_TOL`].
    pub fn new(terms: Vec<Term<F>>) -> Result<Self> {
        let norm: F = terms
            .iter()
            .map(|t| t.coeff.norm_sqr())
            .fold(F::zero(), |a, b| a + b);
        if !norm.is_finite() || (norm - F::one()).abs() > from_f64(NORM_TOL) {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(PolarizationState { terms })
    }

    /// The entangled pair (|V H> + |H V>) / sqrt(2).
    pub fn bell_state() -> Self {
        let c = Complex::new(from_f64::<F>(std::f64::consts::FRAC_1_SQRT_2), F::zero());
        PolarizationState {
            terms: vec![
                Term {
                    coeff: c,
                    signal: Pol::V,
                    idler: Pol::H,
                },
                Term {
                    coeff: c,
                    signal: Pol::H,
                    idler: Pol::V,
                },
            ],
        }
    }

    /// A single product term |signal idler>.
    pub fn product(signal: Pol, idler: Pol) -> Self {
        PolarizationState {
            terms: vec![Term {
                coeff: Complex::new(F::one(), F::zero()),
                signal,
                idler,
            }],
        }
    }

    pub fn terms(&self) -> &[Term<F>] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> F {
        self.terms
            .iter()
            .map(|t| t.coeff.norm_sqr())
            .fold(F::zero(), |a, b| a + b)
    }
}

/// Result of projecting one mode onto one polarization.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionOutcome<F> {
    pub measured_mode: Mode,
    pub measured_polarization: Pol,
    /// Born probability of this outcome on the input state.
    pub probability: F,
    /// Renormalized state conditioned on the outcome.
    pub post_state: PolarizationState<F>,
}

/// Projects `mode` of `state` onto `pol`: keeps the matching terms,
/// renormalizes, and reports the Born probability. A zero-probability
/// outcome has no post state and is an error.
pub fn project_polarization<F: Scalar>(
    state: &PolarizationState<F>,
    mode: Mode,
    pol: Pol,
) -> Result<ProjectionOutcome<F>> {
    let total = state.norm_sqr();
    let kept: Vec<Term<F>> = state
        .terms
        .iter()
        .filter(|t| t.pol(mode) == pol)
        .copied()
        .collect();
    let kept_norm: F = kept
        .iter()
        .map(|t| t.coeff.norm_sqr())
        .fold(F::zero(), |a, b| a + b);
    if kept_norm == F::zero() {
        return Err(Error::OrthogonalProjection);
    }
    let scale = F::one() / kept_norm.sqrt();
    let terms = kept
        .into_iter()
        .map(|t| Term {
            coeff: t.coeff * Complex::new(scale, F::zero()),
            ..t
        })
        .collect();
    Ok(ProjectionOutcome {
        measured_mode: mode,
        measured_polarization: pol,
        probability: kept_norm / total,
        post_state: PolarizationState { terms },
    })
}

/// Which polarizations the pair ends up carrying after both measurements,
/// when the two records disagree about what a collapse should have enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalStateRule {
    /// Keep both raw outcomes as measured.
    Outcomes,
    /// The first detector's outcome wins; the partner is forced orthogonal.
    D1Priority,
    /// The second detector's outcome wins; the partner is forced orthogonal.
    D2Priority,
}

/// Applies a final-state rule to the raw (signal, idler) outcomes.
pub fn final_state(rule: FinalStateRule, signal: Pol, idler: Pol) -> (Pol, Pol) {
    match rule {
        FinalStateRule::Outcomes => (signal, idler),
        FinalStateRule::D1Priority => (signal, signal.orthogonal()),
        FinalStateRule::D2Priority => (idler.orthogonal(), idler),
    }
}

/// Frequency-domain shape of the pair, all in rad/s.
///
/// The joint density is
///
/// ```text
/// p(os, oi) = exp(-(os + oi - omega_p)^2 / (2 sigma_sum^2))
///           * exp(-(os - oi - delta)^2  / (2 sigma_diff^2))
///           / (pi sigma_sum sigma_diff)
/// ```
///
/// normalized over the full plane. The positive-frequency truncation this
/// ignores is bounded by [`TwoPhotonAmplitude::truncation_bound`], which the
/// pump-width invariant keeps far below f64 resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoPhotonAmplitude<F> {
    #[serde(rename = "omega_p_rad_per_s")]
    omega_p: F,
    #[serde(rename = "sigma_sum_rad_per_s")]
    sigma_sum: F,
    #[serde(rename = "sigma_diff_rad_per_s")]
    sigma_diff: F,
    #[serde(rename = "delta_rad_per_s")]
    delta: F,
}

pub const DEFAULT_OMEGA_P: f64 = 2.4e15;
pub const DEFAULT_SIGMA_SUM: f64 = 1.0e12;
pub const DEFAULT_SIGMA_DIFF: f64 = 2.0e13;

impl TwoPhotonAmplitude<f64> {
    /// The default pair: a 2.4e15 rad/s pump, narrow sum, broad difference.
    pub fn defaults() -> Self {
        Self::new(DEFAULT_OMEGA_P, DEFAULT_SIGMA_SUM, DEFAULT_SIGMA_DIFF, 0.0)
            .expect("default amplitude parameters are valid")
    }
}

impl<F: Scalar> TwoPhotonAmplitude<F> {
    pub fn new(omega_p: F, sigma_sum: F, sigma_diff: F, delta: F) -> Result<Self> {
        for (what, v) in [
            ("omega_p", omega_p),
            ("sigma_sum", sigma_sum),
            ("sigma_diff", sigma_diff),
            ("delta", delta),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what });
            }
        }
        for (what, v) in [
            ("omega_p", omega_p),
            ("sigma_sum", sigma_sum),
            ("sigma_diff", sigma_diff),
        ] {
            if v <= F::zero() {
                return Err(Error::NonPositive {
                    what,
                    value: v.as_f64(),
                });
            }
        }
        let bound = from_f64::<F>(10.0) * (sigma_sum + sigma_diff);
        if omega_p < bound {
            return Err(Error::PumpTooNarrow {
                omega_p: omega_p.as_f64(),
                bound: bound.as_f64(),
            });
        }
        if delta.abs() > omega_p / from_f64(2.0) {
            return Err(Error::InvalidParams(
                "|delta| must not exceed omega_p / 2",
            ));
        }
        Ok(TwoPhotonAmplitude {
            omega_p,
            sigma_sum,
            sigma_diff,
            delta,
        })
    }

    pub fn omega_p(&self) -> F {
        self.omega_p
    }

    pub fn sigma_sum(&self) -> F {
        self.sigma_sum
    }

    pub fn sigma_diff(&self) -> F {
        self.sigma_diff
    }

    pub fn delta(&self) -> F {
        self.delta
    }

    /// Mean of the per-photon marginal: (omega_p +- delta) / 2.
    pub fn marginal_mean(&self, mode: Mode) -> F {
        let half = from_f64::<F>(0.5);
        match mode {
            Mode::Signal => half * (self.omega_p + self.delta),
            Mode::Idler => half * (self.omega_p - self.delta),
        }
    }

    /// Standard deviation of either marginal: sqrt(sigma_sum^2 + sigma_diff^2) / 2.
    /// Identical under the correlated and factorized densities.
    pub fn marginal_sd(&self) -> F {
        (self.sigma_sum * self.sigma_sum + self.sigma_diff * self.sigma_diff).sqrt()
            / from_f64(2.0)
    }

    /// Standard deviation of omega_s + omega_i under the correlated density.
    pub fn sum_sd_correlated(&self) -> F {
        self.sigma_sum
    }

    /// Standard deviation of omega_s + omega_i once the sum correlation is
    /// discarded: sqrt((sigma_sum^2 + sigma_diff^2) / 2).
    pub fn sum_sd_factorized(&self) -> F {
        ((self.sigma_sum * self.sigma_sum + self.sigma_diff * self.sigma_diff)
            / from_f64(2.0))
        .sqrt()
    }

    /// Upper bound on the total marginal probability mass at negative
    /// frequencies: the standard Gaussian tail bound exp(-z^2/2) / (z sqrt(2 pi))
    /// per photon, summed over both photons. Underflows to zero for any
    /// amplitude passing the pump-width invariant.
    pub fn truncation_bound(&self) -> F {
        let sd = self.marginal_sd();
        let norm = from_f64::<F>((2.0 * std::f64::consts::PI).sqrt());
        let tail = |mean: F| {
            let z = mean / sd;
            (-(z * z) / from_f64(2.0)).exp() / (z * norm)
        };
        tail(self.marginal_mean(Mode::Signal)) + tail(self.marginal_mean(Mode::Idler))
    }
}

/// Which joint density over (omega_s, omega_i) to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// The entangled pair: correlated in the sum.
    Correlated,
    /// Product of the two marginals: what independent photons would do.
    Factorized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointDensity<F> {
    pub kind: DensityKind,
    pub amplitude: TwoPhotonAmplitude<F>,
}

impl<F: Scalar> JointDensity<F> {
    pub fn eval(&self, omega_s: F, omega_i: F) -> F {
        match self.kind {
            DensityKind::Correlated => density_correlated(&self.amplitude, omega_s, omega_i),
            DensityKind::Factorized => density_factorized(&self.amplitude, omega_s, omega_i),
        }
    }
}

/// The correlated joint density; integrates to 1 over the plane.
pub fn density_correlated<F: Scalar>(a: &TwoPhotonAmplitude<F>, omega_s: F, omega_i: F) -> F {
    let two = from_f64::<F>(2.0);
    let u = omega_s + omega_i - a.omega_p;
    let w = omega_s - omega_i - a.delta;
    let arg = -(u * u) / (two * a.sigma_sum * a.sigma_sum)
        - (w * w) / (two * a.sigma_diff * a.sigma_diff);
    arg.exp() / (from_f64::<F>(std::f64::consts::PI) * a.sigma_sum * a.sigma_diff)
}

fn gauss_pdf<F: Scalar>(x: F, mean: F, sd: F) -> F {
    let z = (x - mean) / sd;
    (-(z * z) / from_f64(2.0)).exp()
        / (sd * from_f64((2.0 * std::f64::consts::PI).sqrt()))
}

/// Marginal density of one photon; the same under both joint densities.
pub fn marginal_density<F: Scalar>(a: &TwoPhotonAmplitude<F>, mode: Mode, omega: F) -> F {
    gauss_pdf(omega, a.marginal_mean(mode), a.marginal_sd())
}

/// Product of the two marginals: the correlation-free comparison density.
pub fn density_factorized<F: Scalar>(a: &TwoPhotonAmplitude<F>, omega_s: F, omega_i: F) -> F {
    marginal_density(a, Mode::Signal, omega_s) * marginal_density(a, Mode::Idler, omega_i)
}

/// First moments of a joint density, rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEnergy<F> {
    #[serde(rename = "omega_s_rad_per_s")]
    pub omega_s: F,
    #[serde(rename = "omega_i_rad_per_s")]
    pub omega_i: F,
    #[serde(rename = "total_rad_per_s")]
    pub total: F,
}

/// Mean frequencies under the density. Correlated and factorized share all
/// three values since they share marginals; what differs is the spread of
/// the sum, not its mean.
pub fn mean_energy<F: Scalar>(d: &JointDensity<F>) -> MeanEnergy<F> {
    let s = d.amplitude.marginal_mean(Mode::Signal);
    let i = d.amplitude.marginal_mean(Mode::Idler);
    MeanEnergy {
        omega_s: s,
        omega_i: i,
        total: s + i,
    }
}

/// How far one sampled pair misses perfect energy balance:
/// (omega_s + omega_i) - omega_p.
pub fn energy_sum_residual<F: Scalar>(a: &TwoPhotonAmplitude<F>, omega_s: F, omega_i: F) -> F {
    (omega_s + omega_i) - a.omega_p
}
