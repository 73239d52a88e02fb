//! Linearized, true-longitude-domain dynamics about the nominal circular
//! orbit, the closed-form costates both rephasing solvers share, and the
//! optimal thrust direction they induce.
//!
//! The boundary frame is fixed throughout: the transfer runs from
//! L0 = -dL/2 to Lf = +dL/2 and callers rotate frames externally. All
//! quantities are canonical (radius 1, mu 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_dense, IntegratorSettings, Trajectory};

/// Deviations from the nominal circular orbit: semi-latus rectum, the two
/// eccentricity-vector components, and time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LinState {
    pub dp: f64,
    pub df: f64,
    pub dg: f64,
    pub dt: f64,
}

impl LinState {
    pub fn to_array(self) -> [f64; 4] {
        [self.dp, self.df, self.dg, self.dt]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self { dp: y[0], df: y[1], dg: y[2], dt: y[3] }
    }
}

/// Thrust acceleration split into radial and transversal components in the
/// local-vertical/local-horizontal frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlLVLH {
    pub a_r: f64,
    pub a_th: f64,
}

impl ControlLVLH {
    pub fn new(a_r: f64, a_th: f64) -> Self {
        Self { a_r, a_th }
    }

    pub fn magnitude(self) -> f64 {
        self.a_r.hypot(self.a_th)
    }

    /// Orientation angle with respect to the transversal direction, rad.
    pub fn gamma(self) -> f64 {
        self.a_r.atan2(self.a_th)
    }
}

/// Costates of the linear problem. `l0` multiplies the whole vector and
/// `l1` is the one remaining free constant of the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinCostates {
    pub l_dp: f64,
    pub l_df: f64,
    pub l_dg: f64,
    pub l0: f64,
    pub l1: f64,
}

/// Right-hand side of the linearized equations of motion.
pub fn lin_rhs(l: f64, ctrl: ControlLVLH, state: LinState) -> [f64; 4] {
    let (s, c) = l.sin_cos();
    [
        2.0 * ctrl.a_th,
        ctrl.a_r * s + 2.0 * ctrl.a_th * c,
        -ctrl.a_r * c + 2.0 * ctrl.a_th * s,
        1.5 * state.dp - 2.0 * state.df * c - 2.0 * state.dg * s,
    ]
}

/// Reduced time-difference rate, valid only under the two-sided boundary
/// constraints on the state deviations (it is not equivalent to the full
/// time row pointwise, only after integration over the whole arc).
pub fn dt_reduced_rhs(l: f64, ctrl: ControlLVLH) -> f64 {
    2.0 * ctrl.a_r - 3.0 * l * ctrl.a_th
}

/// Closed-form costates (l_dp, l_df, l_dg); mid-point symmetry zeroes the
/// first two at L = 0.
pub fn costates_closed_form(l: f64, l0: f64, l1: f64) -> (f64, f64, f64) {
    let (s, c) = l.sin_cos();
    (-1.5 * l0 * l, 2.0 * l0 * s, l0 * (l1 - 2.0 * c))
}

/// The (radial, transversal) numerators of the optimal control direction:
/// (l1 cos L - 2, 3 L - 2 l1 sin L).
pub fn direction_numerators(l: f64, l1: f64) -> (f64, f64) {
    let (s, c) = l.sin_cos();
    (l1 * c - 2.0, 3.0 * l - 2.0 * l1 * s)
}

/// Norm of the direction numerators; also the costate-vector magnitude that
/// enters the switching function.
pub fn direction_norm(l: f64, l1: f64) -> f64 {
    let (r, t) = direction_numerators(l, l1);
    r.hypot(t)
}

/// Unit thrust direction (u_r, u_th) for the given costate constants.
pub fn unit_control_direction(l: f64, l1: f64, sign_l0: f64) -> Result<(f64, f64)> {
    let (r, t) = direction_numerators(l, l1);
    let d = r.hypot(t);
    if d < 1e-14 {
        return Err(Error::SingularDirection(l));
    }
    Ok((sign_l0 * r / d, sign_l0 * t / d))
}

/// Numerator of the dg boundary-constraint integrand:
/// 6 L sin L + 2 cos L - l1 - 3 l1 sin^2 L.
pub fn dg_boundary_numerator(l: f64, l1: f64) -> f64 {
    let (s, c) = l.sin_cos();
    6.0 * l * s + 2.0 * c - l1 - 3.0 * l1 * s * s
}

/// Numerator of the dt boundary-constraint integrand:
/// 9 L^2 + 4 - 6 l1 L sin L - 2 l1 cos L.
pub fn dt_boundary_numerator(l: f64, l1: f64) -> f64 {
    let (s, c) = l.sin_cos();
    9.0 * l * l + 4.0 - 6.0 * l1 * l * s - 2.0 * l1 * c
}

/// Propagates the linear state from rest at L0 = -dL/2 under the control
/// law `ctrl`, returning the final state.
pub fn propagate<F>(ctrl: F, delta_l: f64, settings: &IntegratorSettings) -> Result<LinState>
where
    F: Fn(f64) -> Result<ControlLVLH>,
{
    let half = 0.5 * delta_l;
    let y = integrate(
        |l, y, dy| {
            let c = ctrl(l)?;
            let out = lin_rhs(l, c, LinState::from_slice(y));
            dy.copy_from_slice(&out);
            Ok(())
        },
        (-half, half),
        &[0.0; 4],
        &[],
        settings,
    )?;
    Ok(LinState::from_slice(&y))
}

/// Same as [`propagate`] but keeps dense output for profile sampling.
pub fn propagate_dense<F>(
    ctrl: F,
    delta_l: f64,
    breakpoints: &[f64],
    settings: &IntegratorSettings,
) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<ControlLVLH>,
{
    let half = 0.5 * delta_l;
    integrate_dense(
        |l, y, dy| {
            let c = ctrl(l)?;
            let out = lin_rhs(l, c, LinState::from_slice(y));
            dy.copy_from_slice(&out);
            Ok(())
        },
        (-half, half),
        &[0.0; 4],
        breakpoints,
        settings,
    )
}

/// Integrates the reduced time-difference rate over the whole arc.
pub fn integrate_reduced_dt<F>(
    ctrl: F,
    delta_l: f64,
    settings: &IntegratorSettings,
) -> Result<f64>
where
    F: Fn(f64) -> Result<ControlLVLH>,
{
    let half = 0.5 * delta_l;
    let y = integrate(
        |l, _y, dy| {
            let c = ctrl(l)?;
            dy[0] = dt_reduced_rhs(l, c);
            Ok(())
        },
        (-half, half),
        &[0.0],
        &[],
        settings,
    )?;
    Ok(y[0])
}
