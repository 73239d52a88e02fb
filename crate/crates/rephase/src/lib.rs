//! Low-thrust rephasing in circular orbit: rendezvous with a target on the
//! same orbit at a different angular position.
//!
//! The library solves the time-optimal and propellant-optimal problems on a
//! set of linearized, true-longitude-domain equations of motion where both
//! problems reduce to two-dimensional shooting functions. Solutions over the
//! whole parameter range are tabulated into an atlas (curve and contour
//! grids) that doubles as a warm-start database, and every linear solution
//! can be refined against the full nonlinear equinoctial dynamics by a
//! four-dimensional shooting method.
//!
//! Module map:
//! - [`units`]: canonical scaling (orbit radius = 1, mu = 1, period 2 pi).
//! - [`linmodel`]: linearized dynamics, closed-form costates, optimal
//!   control direction.
//! - [`numerics`]: embedded Runge-Kutta integration, adaptive quadrature,
//!   scalar Newton, and a trust-region dogleg solver for small systems.
//! - [`timeopt`]: time-optimal solver, piecewise approximations, analytic
//!   short/long-term solutions.
//! - [`fuelopt`]: propellant-optimal solver with smoothed bang-bang control
//!   and epsilon-continuation.
//! - [`atlas`]: curve/contour grid generation, persistence, and
//!   interpolation seeds.
//! - [`nonlinear`]: full equinoctial dynamics with costate propagation and
//!   4-D shooting refinement.

pub mod atlas;
pub mod error;
pub mod fuelopt;
pub mod linmodel;
pub mod nonlinear;
pub mod numerics;
pub mod timeopt;
pub mod units;

pub use error::{Error, Result};

/// Crate version embedded in atlas metadata and solution reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default RNG seed for randomized retry draws when the caller provides none.
pub const DEFAULT_RNG_SEED: u64 = 42;
