//! Events, affine boosts, and invariant intervals in 1+1 dimensions.
//!
//! Time is carried as ct in meters so both coordinates of an event share one
//! unit and one dynamic range. Boosts are affine: a linear Lorentz part
//! followed by a translation, which is what frame synchronization conventions
//! turn into once clocks are not zeroed at a common origin.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{from_f64, Scalar};

/// Exact SI speed of light in m/s. Not configurable anywhere in this crate.
pub const C_M_PER_S: f64 = 299_792_458.0;

/// Squared intervals with |s^2| at or below this many m^2 classify as
/// lightlike, absorbing roundoff on nearly null separations.
pub const LIGHTLIKE_TOL_M2: f64 = 1e-6;

/// A point in 1+1-D spacetime. Both coordinates are meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Event<F> {
    #[serde(rename = "ct_m")]
    pub ct: F,
    #[serde(rename = "x_m")]
    pub x: F,
}

impl<F: Scalar> Event<F> {
    pub fn new(ct: F, x: F) -> Result<Self> {
        if !(ct.is_finite() && x.is_finite()) {
            return Err(Error::NonFinite {
                what: "event coordinates",
            });
        }
        Ok(Event { ct, x })
    }
}

/// Affine boost along x:
///
/// ```text
/// ct' = gamma (ct - beta x) + ct_offset
/// x'  = gamma (x - beta ct) + x_offset
/// ```
///
/// gamma - 1 and gamma^2 - 1 are precomputed in cancellation-free form; at
/// beta ~ 3e-7 they sit near 5e-14 where the naive subtractions retain two
/// significant digits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Boost<F> {
    beta: F,
    ct_offset: F,
    x_offset: F,
    gamma: F,
    gamma_m1: F,
    gamma2_m1: F,
}

impl<F: Scalar> Boost<F> {
    /// Pure boost, no translation.
    pub fn new(beta: F) -> Result<Self> {
        Self::with_offsets(beta, F::zero(), F::zero())
    }

    pub fn with_offsets(beta: F, ct_offset: F, x_offset: F) -> Result<Self> {
        if !(ct_offset.is_finite() && x_offset.is_finite()) {
            return Err(Error::NonFinite {
                what: "boost offsets",
            });
        }
        let (gamma, gamma_m1, gamma2_m1) = stable_gamma_quantities(beta)?;
        Ok(Boost {
            beta,
            ct_offset,
            x_offset,
            gamma,
            gamma_m1,
            gamma2_m1,
        })
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn gamma(&self) -> F {
        self.gamma
    }

    /// gamma - 1 without cancellation.
    pub fn gamma_m1(&self) -> F {
        self.gamma_m1
    }

    /// gamma^2 - 1 = beta^2 gamma^2 without cancellation.
    pub fn gamma2_m1(&self) -> F {
        self.gamma2_m1
    }

    pub fn ct_offset(&self) -> F {
        self.ct_offset
    }

    pub fn x_offset(&self) -> F {
        self.x_offset
    }
}

/// Returns (gamma, gamma - 1, gamma^2 - 1) free of catastrophic cancellation.
///
/// gamma^2 - 1 = beta^2 gamma^2 and gamma - 1 = beta^2 gamma^2 / (gamma + 1)
/// are products and quotients of well-conditioned factors, so they hold full
/// precision down to beta ~ 1e-150 instead of collapsing to zero near
/// beta ~ 1e-8.
pub fn stable_gamma_quantities<F: Scalar>(beta: F) -> Result<(F, F, F)> {
    if !beta.is_finite() {
        return Err(Error::NonFinite { what: "beta" });
    }
    if beta.abs() >= F::one() {
        return Err(Error::BetaOutOfRange(beta.as_f64()));
    }
    let one = F::one();
    // (1 - beta)(1 + beta) evaluates 1 - beta^2 without the beta^2 underflow
    // losing bits against the leading 1.
    let gamma2 = one / ((one - beta) * (one + beta));
    let gamma = gamma2.sqrt();
    let gamma2_m1 = beta * beta * gamma2;
    let gamma_m1 = gamma2_m1 / (gamma + one);
    Ok((gamma, gamma_m1, gamma2_m1))
}

/// Applies the boost to an event.
pub fn boost_event<F: Scalar>(e: Event<F>, b: &Boost<F>) -> Result<Event<F>> {
    if !(e.ct.is_finite() && e.x.is_finite()) {
        return Err(Error::NonFinite {
            what: "event coordinates",
        });
    }
    Event::new(
        b.gamma * (e.ct - b.beta * e.x) + b.ct_offset,
        b.gamma * (e.x - b.beta * e.ct) + b.x_offset,
    )
}

/// Exact inverse of [`boost_event`] for the same boost: the translation is
/// undone first, then the reverse rotation is applied.
pub fn inverse_boost<F: Scalar>(e: Event<F>, b: &Boost<F>) -> Result<Event<F>> {
    if !(e.ct.is_finite() && e.x.is_finite()) {
        return Err(Error::NonFinite {
            what: "event coordinates",
        });
    }
    let u = e.ct - b.ct_offset;
    let w = e.x - b.x_offset;
    Event::new(b.gamma * (u + b.beta * w), b.gamma * (w + b.beta * u))
}

/// Squared invariant interval, signature (+, -): s^2 = (dct)^2 - (dx)^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval<F> {
    s2: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalClass {
    Timelike,
    Lightlike,
    Spacelike,
}

impl<F: Scalar> Interval<F> {
    /// Signed s^2 in m^2; positive is timelike.
    pub fn s2(&self) -> F {
        self.s2
    }

    pub fn causal_class(&self) -> CausalClass {
        if self.s2.abs() <= from_f64(LIGHTLIKE_TOL_M2) {
            CausalClass::Lightlike
        } else if self.s2 > F::zero() {
            CausalClass::Timelike
        } else {
            CausalClass::Spacelike
        }
    }
}

pub fn interval<F: Scalar>(a: Event<F>, b: Event<F>) -> Interval<F> {
    let dct = b.ct - a.ct;
    let dx = b.x - a.x;
    Interval {
        s2: dct * dct - dx * dx,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn ev(ct: f64, x: f64) -> Event<f64> {
        Event::new(ct, x).unwrap()
    }

    #[test]
    fn rejects_nonfinite_and_superluminal() {
        assert!(Event::new(f64::NAN, 0.0).is_err());
        assert!(Event::new(0.0, f64::INFINITY).is_err());
        assert_eq!(
            Boost::new(1.0).unwrap_err(),
            Error::BetaOutOfRange(1.0)
        );
        assert!(Boost::new(-1.5).is_err());
        assert!(Boost::new(f64::NAN).is_err());
        assert!(Boost::<f64>::with_offsets(0.5, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn textbook_boost_at_beta_0_6() {
        // gamma = 1.25; (ct, x) = (5, 3) seen from a frame at beta 0.6 lands
        // on the time axis.
        let b = Boost::new(0.6).unwrap();
        let out = boost_event(ev(5.0, 3.0), &b).unwrap();
        assert_relative_eq!(out.ct, 4.0, max_relative = 1e-15);
        assert_abs_diff_eq!(out.x, 0.0, epsilon = 1e-15);
        let back = inverse_boost(out, &b).unwrap();
        assert_relative_eq!(back.ct, 5.0, max_relative = 1e-12);
        assert_relative_eq!(back.x, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn offsets_compose_and_invert() {
        let b = Boost::with_offsets(0.6, -15.0, 25.0).unwrap();
        let out = boost_event(ev(10.0, 0.0), &b).unwrap();
        assert_relative_eq!(out.ct, -2.5, max_relative = 1e-15);
        assert_relative_eq!(out.x, 17.5, max_relative = 1e-15);
        let back = inverse_boost(out, &b).unwrap();
        assert_relative_eq!(back.ct, 10.0, max_relative = 1e-12);
        assert_abs_diff_eq!(back.x, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_quantities_stay_stable_at_small_beta() {
        // Oracle values from a 50-digit evaluation at the f64 nearest to
        // 3.3356e-7.
        let beta = 3.3356e-7_f64;
        let (gamma, gm1, g2m1) = stable_gamma_quantities(beta).unwrap();
        assert_relative_eq!(gm1, 5.563113680000463e-14, max_relative = 1e-12);
        assert_relative_eq!(g2m1, 1.1126227360001236e-13, max_relative = 1e-12);
        // The naive forms lose nearly everything here.
        assert_relative_eq!(gamma, 1.0 + gm1, max_relative = 5e-16);
        // Internal consistency: gamma - 1 = (gamma^2 - 1) / (gamma + 1).
        assert_relative_eq!(gm1, g2m1 / (gamma + 1.0), max_relative = 1e-15);
    }

    #[test]
    fn gamma_quantities_exact_small_beta_identity() {
        // gamma2_m1 must match beta^2 gamma^2 bit for bit by construction,
        // and gamma_m1 the quotient form.
        for &beta in &[0.0, 1e-12, 3.3356e-7, 0.1, 0.6, 0.99] {
            let (gamma, gm1, g2m1) = stable_gamma_quantities(beta).unwrap();
            let gamma2 = 1.0 / ((1.0 - beta) * (1.0 + beta));
            assert_eq!(g2m1, beta * beta * gamma2);
            assert_eq!(gm1, g2m1 / (gamma + 1.0));
        }
    }

    #[test]
    fn small_beta_boost_keeps_time_shift_resolvable() {
        // At beta = 3.3356e-7 a lab-scale event moves by ~1e1 m in x while
        // ct barely moves; the ct shift must come out as the oracle says
        // instead of vanishing.
        let beta = 3.3356e-7_f64;
        let b = Boost::new(beta).unwrap();
        let e = ev(3.0e7, 0.0);
        let out = boost_event(e, &b).unwrap();
        assert_relative_eq!(out.x, -10.006_800_000_000_556, max_relative = 1e-12);
        let shift = out.ct - e.ct;
        assert!(shift.abs() < 2e-6, "time shift {shift} too large");
        // ulp(3e7) ~ 3.7e-9, so the subtraction is quantized at that level.
        assert_abs_diff_eq!(shift, 1.668_934_104e-6, epsilon = 1e-8);
        let back = inverse_boost(out, &b).unwrap();
        assert_relative_eq!(back.ct, e.ct, max_relative = 1e-12);
        // x returns to 0 only up to the event scale: 3e7 * 1e-12 wiggle room.
        assert_abs_diff_eq!(back.x, 0.0, epsilon = 3e-5);
    }

    #[test]
    fn interval_classification() {
        let i = interval(ev(0.0, 0.0), ev(5.0, 3.0));
        assert_eq!(i.s2(), 16.0);
        assert_eq!(i.causal_class(), CausalClass::Timelike);

        let i = interval(ev(0.0, 0.0), ev(3.0, 5.0));
        assert_eq!(i.s2(), -16.0);
        assert_eq!(i.causal_class(), CausalClass::Spacelike);

        let i = interval(ev(1.0, 1.0), ev(4.0, 4.0));
        assert_eq!(i.causal_class(), CausalClass::Lightlike);

        // Just inside the tolerance band on either side.
        let i = interval(ev(0.0, 0.0), ev(1e-3, 0.0));
        assert_eq!(i.causal_class(), CausalClass::Lightlike);
        let i = interval(ev(0.0, 0.0), ev(2e-3, 0.0));
        assert_eq!(i.causal_class(), CausalClass::Timelike);
    }

    #[test]
    fn interval_is_symmetric() {
        let a = ev(2.0, -7.0);
        let b = ev(-3.0, 11.0);
        assert_eq!(interval(a, b).s2(), interval(b, a).s2());
    }

    #[test]
    fn event_serializes_with_unit_suffixes() {
        let s = serde_json::to_string(&ev(1.5, -2.0)).unwrap();
        assert_eq!(s, r#"{"ct_m":1.5,"x_m":-2.0}"#);
    }

    #[test]
    fn works_in_f32() {
        let b = Boost::<f32>::new(0.6).unwrap();
        let out = boost_event(Event::new(5.0f32, 3.0).unwrap(), &b).unwrap();
        assert!((out.ct - 4.0).abs() < 1e-6);
        assert!(out.x.abs() < 1e-6);
    }
}
