//! Core library for planning and simulating a double measurement on one
//! entangled photon pair.
//!
//! Layers, bottom to top:
//!
//! * [`spacetime`]: events, affine boosts, invariant intervals in 1+1-D,
//!   with cancellation-free gamma quantities for beta down to ~1e-10.
//! * [`collapse_geometry`]: collapse lines and regions under three collapse
//!   models, plus the uncollapsed window a moving detector leaves open.
//! * [`experiment_planner`]: places source and detectors so the second
//!   measurement lands inside that window, and checks feasibility.
//! * [`two_photon_state`]: the polarization term algebra and the
//!   correlated/factorized frequency densities of the pair.
//! * [`simulation`]: reproducible Monte Carlo over repeated pair events
//!   under the collapsed and uncollapsed measurement models.
//!
//! The geometry and state layers are generic over the scalar (any
//! [`numeric::Scalar`], so f32 or f64); the planner and the simulation are
//! f64 only since their verification arithmetic (double-double replays,
//! ChaCha streams) is f64-specific. The aliases below fix the f64 working
//! types used throughout the binaries.

pub mod collapse_geometry;
pub mod error;
pub mod experiment_planner;
pub mod numeric;
pub mod simulation;
pub mod spacetime;
pub mod two_photon_state;

pub use error::{Error, Result};
pub use spacetime::C_M_PER_S;

/// Working-precision event.
pub type Event = spacetime::Event<f64>;
/// Working-precision boost.
pub type Boost = spacetime::Boost<f64>;
/// Working-precision interval.
pub type Interval = spacetime::Interval<f64>;
/// Working-precision measurement description.
pub type MeasurementSpec = collapse_geometry::MeasurementSpec<f64>;
/// Working-precision collapse line.
pub type CollapseLine = collapse_geometry::CollapseLine<f64>;
/// Working-precision collapse model.
pub type CollapseModel = collapse_geometry::CollapseModel<f64>;
/// Working-precision region grid bounds.
pub type GridBounds = collapse_geometry::GridBounds<f64>;
/// Working-precision region grid.
pub type RegionGrid = collapse_geometry::RegionGrid<f64>;
/// Working-precision polarization state.
pub type PolarizationState = two_photon_state::PolarizationState<f64>;
/// Working-precision pair amplitude.
pub type TwoPhotonAmplitude = two_photon_state::TwoPhotonAmplitude<f64>;
/// Working-precision joint density.
pub type JointDensity = two_photon_state::JointDensity<f64>;
