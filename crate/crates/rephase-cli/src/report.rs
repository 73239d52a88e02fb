//! Solution reports (JSON to stdout) and plot-ready profile CSVs.

use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use rephase::fuelopt::FuelOptSolution;
use rephase::linmodel;
use rephase::numerics::IntegratorSettings;
use rephase::timeopt::TimeOptSolution;

pub fn settings_json(rng_seed: u64) -> Value {
    json!({
        "quad_tol": rephase::timeopt::QUAD_TOL,
        "residual_tol": 1e-11,
        "integrator_rel_tol": 1e-13,
        "integrator_abs_tol": 1e-13,
        "rng_seed": rng_seed,
    })
}

pub fn emit(command: &str, rng_seed: u64, problem: Value, solver: Value, solution: Value, t0: std::time::Instant) -> Result<()> {
    let report = json!({
        "tool": "rephase",
        "version": rephase::VERSION,
        "command": command,
        "settings": settings_json(rng_seed),
        "problem": problem,
        "solver": solver,
        "solution": solution,
        "timing_ms": t0.elapsed().as_secs_f64() * 1e3,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn f(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Control/state profile of a time-optimal solution, sampled uniformly.
pub fn write_time_profile(sol: &TimeOptSolution, samples: usize, path: &Path) -> Result<()> {
    let settings = IntegratorSettings::default();
    let sol_clone = *sol;
    let traj = linmodel::propagate_dense(
        move |l| sol_clone.control_at(l),
        sol.delta_l,
        &[],
        &settings,
    )?;
    let mut out = String::from("L,a_r,a_th,gamma_deg,dp,df,dg,dt\n");
    let half = 0.5 * sol.delta_l;
    for i in 0..=samples {
        let l = -half + sol.delta_l * i as f64 / samples as f64;
        let c = sol.control_at(l)?;
        let y = traj.sample(l);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            f(l),
            f(c.a_r),
            f(c.a_th),
            f(c.gamma().to_degrees()),
            f(y[0]),
            f(y[1]),
            f(y[2]),
            f(y[3]),
        ));
    }
    write_file(path, &out)
}

/// Same for a propellant-optimal solution; appends the switching function.
pub fn write_fuel_profile(sol: &FuelOptSolution, samples: usize, path: &Path) -> Result<()> {
    let settings = IntegratorSettings::default();
    let sol_clone = sol.clone();
    let traj = linmodel::propagate_dense(
        move |l| sol_clone.control_at(l),
        sol.delta_l,
        &[],
        &settings,
    )?;
    let mut out = String::from("L,a_r,a_th,gamma_deg,dp,df,dg,dt,rho\n");
    let half = 0.5 * sol.delta_l;
    for i in 0..=samples {
        let l = -half + sol.delta_l * i as f64 / samples as f64;
        let c = sol.control_at(l)?;
        let y = traj.sample(l);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            f(l),
            f(c.a_r),
            f(c.a_th),
            f(c.gamma().to_degrees()),
            f(y[0]),
            f(y[1]),
            f(y[2]),
            f(y[3]),
            f(sol.rho_at(l)),
        ));
    }
    write_file(path, &out)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    file.write_all(content.as_bytes())?;
    Ok(())
}
