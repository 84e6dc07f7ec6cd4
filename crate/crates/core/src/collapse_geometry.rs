//! Collapse surfaces, collapse regions, and the uncollapsed window.
//!
//! Everything here lives in one declared working frame. A measurement records
//! the detector's velocity relative to that frame; under the preferred-frame
//! model the state collapses on the detector's simultaneity line through the
//! measurement event, which in the working frame is a line of slope
//! d(ct)/dx = detector_beta. A detector receding at -beta therefore draws a
//! collapse line of slope -beta, and points below that line (earlier in the
//! detector's own time) still see the uncollapsed state.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{from_f64, Scalar};
use crate::spacetime::{Event, C_M_PER_S};

/// Opaque detector name, used to attribute collapse regions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DetectorId(String);

impl DetectorId {
    pub fn new(name: impl Into<String>) -> Self {
        DetectorId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DetectorId {
    fn from(s: &str) -> Self {
        DetectorId::new(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Polarization,
    Frequency,
    None,
}

/// One projective measurement: where it happens, who performs it, and what
/// it looks at. `detector_beta` is the detector's velocity in units of c
/// relative to the working frame the event coordinates are written in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementSpec<F> {
    pub event: Event<F>,
    pub detector_beta: F,
    pub detector_id: DetectorId,
    pub observable: Observable,
}

impl<F: Scalar> MeasurementSpec<F> {
    pub fn new(
        event: Event<F>,
        detector_beta: F,
        detector_id: DetectorId,
        observable: Observable,
    ) -> Result<Self> {
        if !detector_beta.is_finite() {
            return Err(Error::NonFinite {
                what: "detector_beta",
            });
        }
        if detector_beta.abs() >= F::one() {
            return Err(Error::BetaOutOfRange(detector_beta.as_f64()));
        }
        Ok(MeasurementSpec {
            event,
            detector_beta,
            detector_id,
            observable,
        })
    }
}

/// Rule deciding which part of spacetime a measurement has collapsed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseModel<F> {
    /// Collapse spreads along the measuring detector's simultaneity line.
    PreferredFrame,
    /// Collapse reaches exactly the points not strictly inside the past
    /// light cone of the measurement. Lorentz invariant.
    BackwardLightCone,
    /// Like `PreferredFrame`, but every measurement collapses along the
    /// simultaneity line of one shared observer moving at the given beta
    /// relative to the working frame.
    ObserverFrame(F),
}

impl<F: Scalar> CollapseModel<F> {
    pub fn validate(&self) -> Result<()> {
        if let CollapseModel::ObserverFrame(beta) = *self {
            if !beta.is_finite() {
                return Err(Error::NonFinite {
                    what: "observer beta",
                });
            }
            if beta.abs() >= F::one() {
                return Err(Error::BetaOutOfRange(beta.as_f64()));
            }
        }
        Ok(())
    }
}

/// Simultaneity-type collapse boundary: ct = anchor.ct + slope (x - anchor.x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollapseLine<F> {
    pub slope: F,
    pub anchor: Event<F>,
    pub model: CollapseModel<F>,
}

impl<F: Scalar> CollapseLine<F> {
    pub fn ct_at(&self, x: F) -> F {
        self.anchor.ct + self.slope * (x - self.anchor.x)
    }
}

/// Who has collapsed the state at a given point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Uncollapsed,
    CollapsedBy(DetectorId),
    CollapsedByBoth,
}

/// Propagation speed of the collapse front implied by a collapse line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseSpeed<F> {
    /// Slope zero: the front is a simultaneity line of the working frame.
    Instantaneous,
    /// Front speed in m/s; superluminal whenever |slope| < 1, and directed
    /// against the sign of the slope.
    Finite(F),
}

/// The working frame must be the frame in which the detector's own velocity
/// reads `-working_frame_beta`; the two describe the same relative motion
/// from opposite ends, so anything but an exact negation is a sign error in
/// the caller.
fn check_frame<F: Scalar>(m: &MeasurementSpec<F>, working_frame_beta: F) -> Result<()> {
    if working_frame_beta != -m.detector_beta {
        return Err(Error::FrameMismatch {
            working: working_frame_beta.as_f64(),
            detector: m.detector_beta.as_f64(),
        });
    }
    Ok(())
}

/// Preferred-frame collapse line of a measurement, expressed in a working
/// frame that moves at `working_frame_beta` relative to the detector's rest
/// frame. The line's slope equals the detector's velocity in the working
/// frame, i.e. `-working_frame_beta`.
pub fn collapse_line<F: Scalar>(
    m: &MeasurementSpec<F>,
    working_frame_beta: F,
) -> Result<CollapseLine<F>> {
    check_frame(m, working_frame_beta)?;
    Ok(CollapseLine {
        slope: -working_frame_beta,
        anchor: m.event,
        model: CollapseModel::PreferredFrame,
    })
}

/// Speed at which the collapse front sweeps the working frame: c / slope.
pub fn collapse_speed<F: Scalar>(line: &CollapseLine<F>) -> CollapseSpeed<F> {
    if line.slope == F::zero() {
        CollapseSpeed::Instantaneous
    } else {
        CollapseSpeed::Finite(from_f64::<F>(C_M_PER_S) / line.slope)
    }
}

/// How long (in ct meters) a point at position `x_query` on the first
/// detector's worldline axis keeps seeing the uncollapsed state after the
/// measurement at `m`, clamped at zero on the collapsed side.
///
/// Geometrically this is the rise of the collapse line between the
/// measurement position and the query position.
pub fn window_duration<F: Scalar>(
    x_query: F,
    m: &MeasurementSpec<F>,
    working_frame_beta: F,
) -> Result<F> {
    check_frame(m, working_frame_beta)?;
    let w = working_frame_beta * (m.event.x - x_query);
    Ok(w.max(F::zero()))
}

/// True when `candidate` happens after the first measurement but still
/// strictly below its collapse line, so a second measurement there sees the
/// uncollapsed state. Both comparisons are strict: points on the line or
/// simultaneous with the first measurement do not qualify.
pub fn second_measurement_allowed<F: Scalar>(
    candidate: Event<F>,
    first: &MeasurementSpec<F>,
    working_frame_beta: F,
) -> Result<bool> {
    let line = collapse_line(first, working_frame_beta)?;
    Ok(candidate.ct > first.event.ct && candidate.ct < line.ct_at(candidate.x))
}

/// Classifies one point of the working frame against up to two measurements.
///
/// Preferred-frame and observer-frame models collapse the closed half-plane
/// on and above the measurement's collapse line; the backward-light-cone
/// model leaves uncollapsed only the open interior of the past cone.
pub fn classify_point<F: Scalar>(
    p: Event<F>,
    measurements: &[MeasurementSpec<F>],
    model: CollapseModel<F>,
) -> Result<Region> {
    if measurements.len() > 2 {
        return Err(Error::TooManyMeasurements(measurements.len()));
    }
    model.validate()?;
    let mut collapsed_by: Vec<&DetectorId> = Vec::new();
    for m in measurements {
        if collapsed_at(p, m, model) {
            collapsed_by.push(&m.detector_id);
        }
    }
    Ok(match collapsed_by.as_slice() {
        [] => Region::Uncollapsed,
        [one] => Region::CollapsedBy((*one).clone()),
        _ => Region::CollapsedByBoth,
    })
}

fn collapsed_at<F: Scalar>(p: Event<F>, m: &MeasurementSpec<F>, model: CollapseModel<F>) -> bool {
    match model {
        // On or above the detector's simultaneity line through the event.
        CollapseModel::PreferredFrame => {
            p.ct - m.detector_beta * p.x >= m.event.ct - m.detector_beta * m.event.x
        }
        CollapseModel::ObserverFrame(beta) => {
            p.ct - beta * p.x >= m.event.ct - beta * m.event.x
        }
        // Uncollapsed only strictly inside the past cone; the cone surface
        // itself is already collapsed. No tolerance here: the comparison is
        // between two differences, not two squares.
        CollapseModel::BackwardLightCone => !((m.event.ct - p.ct) > (m.event.x - p.x).abs()),
    }
}

/// Axis-aligned rectangle in the working frame, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridBounds<F> {
    #[serde(rename = "ct_min_m")]
    pub ct_min: F,
    #[serde(rename = "ct_max_m")]
    pub ct_max: F,
    #[serde(rename = "x_min_m")]
    pub x_min: F,
    #[serde(rename = "x_max_m")]
    pub x_max: F,
}

impl<F: Scalar> GridBounds<F> {
    pub fn new(ct_min: F, ct_max: F, x_min: F, x_max: F) -> Result<Self> {
        if !(ct_min.is_finite() && ct_max.is_finite() && x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NonFinite { what: "bounds" });
        }
        if !(ct_max > ct_min) {
            return Err(Error::DegenerateBounds("ct_max must exceed ct_min"));
        }
        if !(x_max > x_min) {
            return Err(Error::DegenerateBounds("x_max must exceed x_min"));
        }
        Ok(GridBounds {
            ct_min,
            ct_max,
            x_min,
            x_max,
        })
    }
}

/// Region classification sampled at cell centers of a regular grid.
/// Row-major storage: row index runs over ct from ct_min upward, column
/// index over x from x_min rightward.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid<F> {
    bounds: GridBounds<F>,
    n_ct: usize,
    n_x: usize,
    cells: Vec<Region>,
}

impl<F: Scalar> RegionGrid<F> {
    pub fn bounds(&self) -> &GridBounds<F> {
        &self.bounds
    }

    pub fn n_ct(&self) -> usize {
        self.n_ct
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn cell(&self, i_ct: usize, i_x: usize) -> &Region {
        &self.cells[i_ct * self.n_x + i_x]
    }

    /// Center of cell (i_ct, i_x) in working-frame coordinates.
    pub fn center(&self, i_ct: usize, i_x: usize) -> Event<F> {
        let half = from_f64::<F>(0.5);
        let fct = (from_f64::<F>(i_ct as f64) + half) / from_f64(self.n_ct as f64);
        let fx = (from_f64::<F>(i_x as f64) + half) / from_f64(self.n_x as f64);
        Event {
            ct: self.bounds.ct_min + fct * (self.bounds.ct_max - self.bounds.ct_min),
            x: self.bounds.x_min + fx * (self.bounds.x_max - self.bounds.x_min),
        }
    }

    pub fn cells(&self) -> &[Region] {
        &self.cells
    }
}

/// Classifies every cell center of an `n_ct` by `n_x` grid over `bounds`.
pub fn region_map<F: Scalar>(
    bounds: GridBounds<F>,
    resolution: (usize, usize),
    measurements: &[MeasurementSpec<F>],
    model: CollapseModel<F>,
) -> Result<RegionGrid<F>> {
    let (n_ct, n_x) = resolution;
    if n_ct == 0 || n_x == 0 {
        return Err(Error::ZeroResolution);
    }
    if measurements.len() > 2 {
        return Err(Error::TooManyMeasurements(measurements.len()));
    }
    model.validate()?;
    let mut grid = RegionGrid {
        bounds,
        n_ct,
        n_x,
        cells: Vec::with_capacity(n_ct * n_x),
    };
    for i_ct in 0..n_ct {
        for i_x in 0..n_x {
            let p = grid.center(i_ct, i_x);
            grid.cells.push(classify_point(p, measurements, model)?);
        }
    }
    Ok(grid)
}
