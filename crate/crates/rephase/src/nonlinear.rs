//! Full nonlinear planar dynamics in equinoctial elements with the true
//! longitude as independent variable, costate propagation, and the 4-D
//! shooting refinements used to validate the linear solutions.
//!
//! State order used throughout the propagation:
//! [p, f, g, t, lp, lf, lg, lt, J]. The time costate has zero rate and J
//! accumulates the velocity increment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuelopt::{throttle, FuelOptProblem, FuelOptSolution};
use crate::linmodel::costates_closed_form;
use crate::numerics::{
    hybrid_solve, integrate, integrate_dense, IntegratorSettings, RootSettings, Trajectory,
};
use crate::timeopt::TimeOptSolution;

/// Planar equinoctial state plus time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquinoctialState {
    pub p: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub t: f64,
}

/// Costates conjugate to (p, f, g) and to time; lt is a first integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinCostates {
    pub lx: [f64; 3],
    pub lt: f64,
}

/// Which running cost drives the control law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CostKind {
    Time,
    Fuel { epsilon: f64 },
}

fn check_domain(p: f64, w: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("semi-latus rectum must stay positive, got {p}")));
    }
    if !(w > 0.0) {
        return Err(Error::Domain(format!("w = 1 + f cos L + g sin L must stay positive, got {w}")));
    }
    Ok(())
}

/// Sundman factor A = w^2 sqrt(mu / p^3) with mu = 1.
pub fn sundman_rate(x: &[f64; 3], l: f64) -> Result<f64> {
    let (s, c) = l.sin_cos();
    let w = 1.0 + x[1] * c + x[2] * s;
    check_domain(x[0], w)?;
    Ok(w * w / x[0].powf(1.5))
}

/// Control-influence matrix (3 x 2), columns ordered (radial, transversal).
pub fn b_matrix(x: &[f64; 3], l: f64) -> Result<[[f64; 2]; 3]> {
    let (s, c) = l.sin_cos();
    let w = 1.0 + x[1] * c + x[2] * s;
    check_domain(x[0], w)?;
    let sqp = x[0].sqrt();
    Ok([
        [0.0, 2.0 * x[0] * sqp / w],
        [sqp * s, sqp * (c + (c + x[1]) / w)],
        [-sqp * c, sqp * (s + (s + x[2]) / w)],
    ])
}

/// Rates of (p, f, g, t) with respect to true longitude for a given thrust
/// vector (a_r, a_th).
pub fn equinoctial_rhs(x: &[f64; 3], l: f64, ctrl: [f64; 2]) -> Result<[f64; 4]> {
    let a = sundman_rate(x, l)?;
    let b = b_matrix(x, l)?;
    Ok([
        (b[0][0] * ctrl[0] + b[0][1] * ctrl[1]) / a,
        (b[1][0] * ctrl[0] + b[1][1] * ctrl[1]) / a,
        (b[2][0] * ctrl[0] + b[2][1] * ctrl[1]) / a,
        1.0 / a,
    ])
}

/// Hamiltonian (lx . B a + lt + phi) / A at a frozen control.
pub fn hamiltonian(x: &[f64; 3], l: f64, lx: &[f64; 3], lt: f64, ctrl: [f64; 2], phi: f64) -> Result<f64> {
    let a = sundman_rate(x, l)?;
    let b = b_matrix(x, l)?;
    let mut m = 0.0;
    for i in 0..3 {
        m += lx[i] * (b[i][0] * ctrl[0] + b[i][1] * ctrl[1]);
    }
    Ok((m + lt + phi) / a)
}

/// Costate rates -dH/dx at a frozen control, from the closed-form partials
/// of B and A with respect to the elements.
pub fn costate_rhs(
    x: &[f64; 3],
    l: f64,
    lx: &[f64; 3],
    lt: f64,
    ctrl: [f64; 2],
    phi: f64,
) -> Result<[f64; 3]> {
    let (s, c) = l.sin_cos();
    let p = x[0];
    let w = 1.0 + x[1] * c + x[2] * s;
    check_domain(p, w)?;
    let a = w * w / p.powf(1.5);
    let sqp = p.sqrt();
    let b = b_matrix(x, l)?;

    let mut m = 0.0;
    for i in 0..3 {
        m += lx[i] * (b[i][0] * ctrl[0] + b[i][1] * ctrl[1]);
    }
    let h = (m + lt + phi) / a;

    // dA/dx
    let da = [-1.5 * a / p, 2.0 * a * c / w, 2.0 * a * s / w];

    // dm/dx; only the transversal column of B depends on (f, g), and the
    // sqrt(p) factor plus the (1,2) entry depend on p.
    let w2 = w * w;
    let dcp_df = -2.0 * p * c / w2;
    let dcp_dg = -2.0 * p * s / w2;
    let dcf_df = (w - (c + x[1]) * c) / w2;
    let dcf_dg = -(c + x[1]) * s / w2;
    let dcg_df = -(s + x[2]) * c / w2;
    let dcg_dg = (w - (s + x[2]) * s) / w2;
    let dm = [
        m / (2.0 * p) + 2.0 * sqp * lx[0] * ctrl[1] / w,
        sqp * ctrl[1] * (lx[0] * dcp_df + lx[1] * dcf_df + lx[2] * dcg_df),
        sqp * ctrl[1] * (lx[0] * dcp_dg + lx[1] * dcf_dg + lx[2] * dcg_dg),
    ];

    Ok([
        (-dm[0] + h * da[0]) / a,
        (-dm[1] + h * da[1]) / a,
        (-dm[2] + h * da[2]) / a,
    ])
}

/// Optimal thrust vector and the value of the switching function.
pub fn nonlinear_control(
    x: &[f64; 3],
    l: f64,
    lx: &[f64; 3],
    kind: CostKind,
    a_max: f64,
) -> Result<([f64; 2], f64)> {
    let b = b_matrix(x, l)?;
    let bt = [
        b[0][0] * lx[0] + b[1][0] * lx[1] + b[2][0] * lx[2],
        b[0][1] * lx[0] + b[1][1] * lx[1] + b[2][1] * lx[2],
    ];
    let norm = bt[0].hypot(bt[1]);
    if norm < 1e-14 {
        return Err(Error::SingularDirection(l));
    }
    let rho = 1.0 - norm;
    let mag = match kind {
        CostKind::Time => a_max,
        CostKind::Fuel { epsilon } => a_max * throttle(rho, epsilon),
    };
    Ok(([-mag * bt[0] / norm, -mag * bt[1] / norm], rho))
}

fn dynamics_rhs(l: f64, y: &[f64], dy: &mut [f64], kind: CostKind, a_max: f64) -> Result<()> {
    let x = [y[0], y[1], y[2]];
    let lx = [y[4], y[5], y[6]];
    let lt = y[7];
    let (ctrl, _) = nonlinear_control(&x, l, &lx, kind, a_max)?;
    let phi = match kind {
        CostKind::Time => 1.0,
        CostKind::Fuel { .. } => ctrl[0].hypot(ctrl[1]),
    };
    let xr = equinoctial_rhs(&x, l, ctrl)?;
    let cr = costate_rhs(&x, l, &lx, lt, ctrl, phi)?;
    dy[0] = xr[0];
    dy[1] = xr[1];
    dy[2] = xr[2];
    dy[3] = xr[3];
    dy[4] = cr[0];
    dy[5] = cr[1];
    dy[6] = cr[2];
    dy[7] = 0.0;
    dy[8] = phi_cost(kind, ctrl) / sundman_rate(&x, l)?;
    Ok(())
}

fn phi_cost(kind: CostKind, ctrl: [f64; 2]) -> f64 {
    match kind {
        // Velocity increment accumulates at the (constant) thrust level.
        CostKind::Time => ctrl[0].hypot(ctrl[1]),
        CostKind::Fuel { .. } => ctrl[0].hypot(ctrl[1]),
    }
}

fn initial_state(lx0: &[f64; 3], lt: f64) -> [f64; 9] {
    [1.0, 0.0, 0.0, 0.0, lx0[0], lx0[1], lx0[2], lt, 0.0]
}

/// Propagates states and costates from the nominal orbit at L0 = -dL/2 with
/// the optimal feedback control; returns the final 9-vector.
pub fn propagate(
    lx0: &[f64; 3],
    lt: f64,
    delta_l: f64,
    kind: CostKind,
    a_max: f64,
    settings: &IntegratorSettings,
) -> Result<Vec<f64>> {
    let half = 0.5 * delta_l;
    integrate(
        |l, y, dy| dynamics_rhs(l, y, dy, kind, a_max),
        (-half, half),
        &initial_state(lx0, lt),
        &[],
        settings,
    )
}

/// Same with dense output, for profile extraction.
pub fn propagate_dense(
    lx0: &[f64; 3],
    lt: f64,
    delta_l: f64,
    kind: CostKind,
    a_max: f64,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    let half = 0.5 * delta_l;
    integrate_dense(
        |l, y, dy| dynamics_rhs(l, y, dy, kind, a_max),
        (-half, half),
        &initial_state(lx0, lt),
        &[],
        settings,
    )
}

/// Maps a converged linear time-optimal solution to nonlinear shooting
/// variables: boundary costates from the closed form with |l0| = 1, the
/// time costate from lt + 1 = l0, and dL as the initial guess.
pub fn map_time_costates(sol: &TimeOptSolution) -> (NonlinCostates, f64) {
    let l0 = f64::from(sol.sign_l0);
    let (lp, lf, lg) = costates_closed_form(-0.5 * sol.delta_l, l0, sol.l1);
    (NonlinCostates { lx: [lp, lf, lg], lt: l0 - 1.0 }, sol.delta_l)
}

/// Maps a converged linear propellant-optimal solution: boundary costates
/// from the closed form and lt = l0 directly.
pub fn map_fuel_costates(sol: &FuelOptSolution) -> NonlinCostates {
    let (lp, lf, lg) = costates_closed_form(-0.5 * sol.delta_l, sol.l0, sol.l1);
    NonlinCostates { lx: [lp, lf, lg], lt: sol.l0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinTimeSolution {
    pub lx0: [f64; 3],
    pub lt: f64,
    pub delta_l: f64,
    pub sign_l0: i8,
    pub a_max: f64,
    pub dt_f: f64,
    pub tof: f64,
    /// Velocity increment a_max * tof.
    pub j: f64,
    pub iterations: usize,
    pub residual_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinFuelSolution {
    pub lx0: [f64; 3],
    pub lt: f64,
    pub delta_l: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub a_max: f64,
    pub chi: f64,
    pub dt_f: f64,
    pub j: f64,
    pub j_norm: f64,
    pub iterations: usize,
    pub residual_inf: f64,
}

fn default_root() -> RootSettings {
    RootSettings { residual_tol: 1e-9, max_iters: 100, ..Default::default() }
}

/// Refines a time-optimal transfer against the nonlinear dynamics: shooting
/// variables are the boundary costates and dL; the time costate is pinned
/// by the |lt + 1| = 1 normalization so the scale freedom is removed.
pub fn solve_nonlinear_time(
    dt_f: f64,
    a_max: f64,
    guess: (NonlinCostates, f64),
    settings: &IntegratorSettings,
) -> Result<NonlinTimeSolution> {
    let sign_l0: i8 = if dt_f < 0.0 { 1 } else { -1 };
    let lt = f64::from(sign_l0) - 1.0;
    let z0 = [guess.0.lx[0], guess.0.lx[1], guess.0.lx[2], guess.1];
    let integ = *settings;
    let sol = hybrid_solve(
        |z: &[f64]| {
            let dl = z[3];
            if !(dl > 0.0) {
                return Err(Error::Domain(format!("dL must stay positive, got {dl}")));
            }
            let y = propagate(&[z[0], z[1], z[2]], lt, dl, CostKind::Time, a_max, &integ)?;
            Ok(vec![y[0] - 1.0, y[1], y[2], y[3] - (dl + dt_f)])
        },
        &z0,
        &default_root(),
    )?;
    let dl = sol.z[3];
    let y = propagate(&[sol.z[0], sol.z[1], sol.z[2]], lt, dl, CostKind::Time, a_max, &integ)?;
    Ok(NonlinTimeSolution {
        lx0: [sol.z[0], sol.z[1], sol.z[2]],
        lt,
        delta_l: dl,
        sign_l0,
        a_max,
        dt_f,
        tof: y[3],
        j: y[8],
        iterations: sol.iterations,
        residual_inf: sol.residual_inf,
    })
}

/// Refines a propellant-optimal transfer: dL is fixed, the shooting
/// variables are the boundary costates and the time costate.
pub fn solve_nonlinear_fuel(
    problem: &FuelOptProblem,
    guess: NonlinCostates,
    settings: &IntegratorSettings,
) -> Result<NonlinFuelSolution> {
    let dl = problem.delta_l;
    let a_max = problem.a_max;
    let kind = CostKind::Fuel { epsilon: problem.epsilon };
    let t_f = dl + problem.dt_f();
    let z0 = [guess.lx[0], guess.lx[1], guess.lx[2], guess.lt];
    let integ = *settings;
    let sol = hybrid_solve(
        |z: &[f64]| {
            let y = propagate(&[z[0], z[1], z[2]], z[3], dl, kind, a_max, &integ)?;
            Ok(vec![y[0] - 1.0, y[1], y[2], y[3] - t_f])
        },
        &z0,
        &default_root(),
    )?;
    let y = propagate(&[sol.z[0], sol.z[1], sol.z[2]], sol.z[3], dl, kind, a_max, &integ)?;
    Ok(NonlinFuelSolution {
        lx0: [sol.z[0], sol.z[1], sol.z[2]],
        lt: sol.z[3],
        delta_l: dl,
        eta: problem.eta,
        epsilon: problem.epsilon,
        a_max,
        chi: problem.chi,
        dt_f: problem.dt_f(),
        j: y[8],
        j_norm: y[8] / (a_max * dl),
        iterations: sol.iterations,
        residual_inf: sol.residual_inf,
    })
}

/// Burn-arc count of a nonlinear propellant solution: the switching
/// function 1 - |B^T lambda_x| is sampled along the propagated trajectory
/// and maximal negative intervals are counted.
pub fn count_burn_arcs_nonlinear(
    sol: &NonlinFuelSolution,
    settings: &IntegratorSettings,
) -> Result<(usize, Vec<f64>)> {
    let traj = propagate_dense(
        &sol.lx0,
        sol.lt,
        sol.delta_l,
        CostKind::Fuel { epsilon: sol.epsilon },
        sol.a_max,
        settings,
    )?;
    let half = 0.5 * sol.delta_l;
    let n = ((sol.delta_l * 64.0) as usize).max(2001) | 1;
    let mut arcs = 0usize;
    let mut burning = false;
    let mut rhos = Vec::with_capacity(n);
    for i in 0..n {
        let l = -half + sol.delta_l * i as f64 / (n - 1) as f64;
        let y = traj.sample(l);
        let x = [y[0], y[1], y[2]];
        let lx = [y[4], y[5], y[6]];
        let (_, rho) = nonlinear_control(&x, l, &lx, CostKind::Fuel { epsilon: sol.epsilon }, sol.a_max)?;
        rhos.push(rho);
        if rho < 0.0 && !burning {
            arcs += 1;
            burning = true;
        } else if rho >= 0.0 {
            burning = false;
        }
    }
    Ok((arcs, rhos))
}

/// Epsilon continuation on the nonlinear propellant problem, one decade per
/// step by default, warm-starting each solve from the previous costates.
pub fn continue_epsilon_nonlinear(
    problem: &FuelOptProblem,
    solution: &NonlinFuelSolution,
    epsilon_target: f64,
    factor: f64,
    settings: &IntegratorSettings,
) -> Result<NonlinFuelSolution> {
    if !(epsilon_target > 0.0) || !(factor > 1.0) {
        return Err(Error::Domain(format!(
            "need epsilon_target > 0 and factor > 1, got ({epsilon_target}, {factor})"
        )));
    }
    let mut current = *solution;
    let mut eps = solution.epsilon;
    while eps > epsilon_target * (1.0 + 1e-12) {
        let next = (eps / factor).max(epsilon_target);
        let sub = problem.with_epsilon(next);
        let guess = NonlinCostates { lx: current.lx0, lt: current.lt };
        current = solve_nonlinear_fuel(&sub, guess, settings).map_err(|e| Error::Continuation {
            last_good: eps,
            target: next,
            source: Box::new(e),
        })?;
        eps = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmodel::{lin_rhs, unit_control_direction, ControlLVLH, LinState};
    use crate::timeopt::{solve_time_optimal, Strategy, TimeOptProblem};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn nominal_orbit_is_an_equilibrium() {
        let x = [1.0, 0.0, 0.0];
        let r = equinoctial_rhs(&x, 0.37, [0.0, 0.0]).unwrap();
        assert_eq!(&r[..3], &[0.0, 0.0, 0.0]);
        assert_relative_eq!(r[3], 1.0);
    }

    #[test]
    fn control_matrix_at_nominal_midpoint() {
        let b = b_matrix(&[1.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(b[0], [0.0, 2.0]);
        assert_eq!(b[1], [0.0, 2.0]);
        assert_eq!(b[2], [-1.0, 0.0]);
    }

    #[test]
    fn degenerate_geometry_is_rejected() {
        assert!(equinoctial_rhs(&[-1.0, 0.0, 0.0], 0.0, [0.0, 0.0]).is_err());
        // w <= 0 for a large eccentricity vector pointing against L.
        assert!(equinoctial_rhs(&[1.0, -1.5, 0.0], 0.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn costate_rates_match_hamiltonian_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 100 {
            let x = [
                rng.gen_range(0.7..1.3),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
            ];
            let l = rng.gen_range(-6.0..6.0);
            let lx = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let lt = rng.gen_range(-2.0..2.0);
            let ctrl = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)];
            let phi = 1.0;
            let Ok(analytic) = costate_rhs(&x, l, &lx, lt, ctrl, phi) else {
                continue;
            };
            for i in 0..3 {
                let h = 1e-6 * x[i].abs().max(1.0);
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let hp = hamiltonian(&xp, l, &lx, lt, ctrl, phi).unwrap();
                let hm = hamiltonian(&xm, l, &lx, lt, ctrl, phi).unwrap();
                let fd = -(hp - hm) / (2.0 * h);
                let scale = analytic[i].abs().max(1e-6);
                assert!(
                    (analytic[i] - fd).abs() / scale < 1e-5,
                    "component {i}: analytic {} vs fd {}",
                    analytic[i],
                    fd
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn zero_control_costate_rates_reduce_to_the_sundman_term() {
        let x = [1.1, 0.0, 0.0];
        let lx = [0.3, -0.8, 1.2];
        let lt = 0.5;
        let l = 0.9;
        let r = costate_rhs(&x, l, &lx, lt, [0.0, 0.0], 1.0).unwrap();
        let a = sundman_rate(&x, l).unwrap();
        let da = [
            -1.5 * a / x[0],
            2.0 * a * l.cos(),
            2.0 * a * l.sin(),
        ];
        for i in 0..3 {
            assert_relative_eq!(r[i], (lt + 1.0) / a * da[i] / a, max_relative = 1e-12);
        }
    }

    #[test]
    fn time_control_magnitude_is_saturated() {
        let x = [1.0, 0.01, -0.02];
        let lx = [0.2, -0.4, 0.1];
        let (ctrl, _) = nonlinear_control(&x, 0.3, &lx, CostKind::Time, 0.05).unwrap();
        assert_relative_eq!(ctrl[0].hypot(ctrl[1]), 0.05, max_relative = 1e-12);
    }

    #[test]
    fn fuel_control_half_throttle_on_the_switch() {
        // lg = -1 at the nominal mid-point makes |B^T lambda| exactly 1.
        let x = [1.0, 0.0, 0.0];
        let lx = [0.0, 0.0, -1.0];
        let (ctrl, rho) =
            nonlinear_control(&x, 0.0, &lx, CostKind::Fuel { epsilon: 0.05 }, 0.2).unwrap();
        assert_relative_eq!(rho, 0.0, epsilon = 1e-14);
        assert_relative_eq!(ctrl[0].hypot(ctrl[1]), 0.1, max_relative = 1e-12);
    }

    #[test]
    fn linearized_model_agrees_for_weak_thrust() {
        // Drive both models with the same explicit control profile over one
        // orbit and compare the deviations elementwise.
        let a_max = 1e-4;
        let l1 = 2.5;
        let ctrl_at = |l: f64| {
            let (ur, ut) = unit_control_direction(l, l1, 1.0).unwrap();
            [a_max * ur, a_max * ut]
        };
        let settings = IntegratorSettings::default();

        let y = integrate(
            |l, y, dy| {
                let x = [y[0], y[1], y[2]];
                let r = equinoctial_rhs(&x, l, ctrl_at(l))?;
                dy.copy_from_slice(&r);
                Ok(())
            },
            (-PI, PI),
            &[1.0, 0.0, 0.0, 0.0],
            &[],
            &settings,
        )
        .unwrap();

        let lin = integrate(
            |l, y, dy| {
                let c = ctrl_at(l);
                let r = lin_rhs(l, ControlLVLH::new(c[0], c[1]), LinState::from_slice(y));
                dy.copy_from_slice(&r);
                Ok(())
            },
            (-PI, PI),
            &[0.0; 4],
            &[],
            &settings,
        )
        .unwrap();

        let nonlin_dev = [y[0] - 1.0, y[1], y[2], y[3] - 2.0 * PI];
        for i in 0..4 {
            assert!(
                (nonlin_dev[i] - lin[i]).abs() <= 1e-6,
                "element {i}: {} vs {}",
                nonlin_dev[i],
                lin[i]
            );
        }
    }

    #[test]
    fn map_reference_time_cases() {
        let p = TimeOptProblem::from_chi(0.05, 0.1, 1).unwrap();
        let sol = solve_time_optimal(&p, Strategy::DoubleLoop).unwrap();
        let (c, dl) = map_time_costates(&sol);
        assert_relative_eq!(c.lx[0], 0.33650, epsilon = 1e-4);
        assert_relative_eq!(c.lx[1], -0.44491, epsilon = 1e-4);
        assert_relative_eq!(c.lx[2], 0.04464, epsilon = 1e-4);
        assert_relative_eq!(dl, 0.44866, epsilon = 5e-4);
        assert_eq!(c.lt, 0.0);

        let p = TimeOptProblem::from_chi(1000.0, 0.001, 1).unwrap();
        let sol = solve_time_optimal(&p, Strategy::DoubleLoop).unwrap();
        let (c, _) = map_time_costates(&sol);
        assert_relative_eq!(c.lx[0], 27.30648, epsilon = 1e-4);
        assert_relative_eq!(c.lx[1], 1.20278, epsilon = 1e-4);
        assert_relative_eq!(c.lx[2], -1.06349, epsilon = 1e-4);
    }

    #[test]
    fn short_case_nonlinear_refinement() {
        let p = TimeOptProblem::from_phase(-0.005, 0.1).unwrap();
        let lin = solve_time_optimal(&p, Strategy::DoubleLoop).unwrap();
        let guess = map_time_costates(&lin);
        let settings = IntegratorSettings::default();
        let sol = solve_nonlinear_time(-0.005, 0.1, guess, &settings).unwrap();
        assert_relative_eq!(sol.delta_l, 0.45366, epsilon = 1e-3);
        assert_relative_eq!(sol.lx0[0], 0.33160, epsilon = 1e-3);
        assert_relative_eq!(sol.lx0[1], -0.43755, epsilon = 1e-3);
        assert_relative_eq!(sol.lx0[2], 0.04477, epsilon = 1e-3);
        assert!(sol.residual_inf <= 1e-9);

        // lt is carried as a state with zero rate; it must not drift.
        let y = propagate(&sol.lx0, sol.lt, sol.delta_l, CostKind::Time, 0.1, &settings).unwrap();
        assert!((y[7] - sol.lt).abs() <= 1e-10);
    }
}
