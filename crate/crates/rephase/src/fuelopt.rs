//! Propellant-optimal rephasing. The thrust direction keeps the same
//! closed form as the time-optimal problem while the magnitude becomes
//! bang-bang, governed by the switching function rho = 1 - |l0| D(L) and
//! smoothed here by a hyperbolic tangent with sharpness epsilon. The
//! boundary constraints again reduce to two scalar equations, now in the
//! costate constants (l0, l1), parametrized by (dL, eta) where
//! chi = (1 - eta^2) chi_max(dL).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linmodel::{
    dg_boundary_numerator, direction_norm, dt_boundary_numerator, unit_control_direction,
    ControlLVLH,
};
use crate::numerics::{hybrid_solve, quad_adaptive, RootSettings};
use crate::timeopt;

/// Quadrature tolerance for the shooting integrals.
pub const QUAD_TOL: f64 = 1e-12;

/// Below this smoothing level the quadrature is subdivided at the switching
/// roots; above it the smoothed integrand is benign.
pub const SWITCH_SPLIT_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelOptProblem {
    pub delta_l: f64,
    pub eta: f64,
    pub a_max: f64,
    pub epsilon: f64,
    /// (1 - eta^2) * chi_max, from the exact time-optimal solve.
    pub chi: f64,
    pub chi_max: f64,
}

impl FuelOptProblem {
    /// Builds the problem, computing chi_max from the exact time-optimal
    /// solution rather than the piecewise fit.
    pub fn new(delta_l: f64, eta: f64, a_max: f64, epsilon: f64) -> Result<Self> {
        if !(delta_l > 0.0) {
            return Err(Error::Domain(format!("dL must be positive, got {delta_l}")));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0, 1), got {eta}")));
        }
        if !(a_max > 0.0) || !(epsilon > 0.0) {
            return Err(Error::Domain(format!(
                "a_max and epsilon must be positive, got ({a_max}, {epsilon})"
            )));
        }
        let chi_max = timeopt::chi_max_exact(delta_l)?;
        Ok(Self {
            delta_l,
            eta,
            a_max,
            epsilon,
            chi: (1.0 - eta * eta) * chi_max,
            chi_max,
        })
    }

    /// Builds the problem from a precomputed chi_max (one time-optimal solve
    /// serves a whole grid column).
    pub fn with_chi_max(delta_l: f64, eta: f64, a_max: f64, epsilon: f64, chi_max: f64) -> Self {
        Self {
            delta_l,
            eta,
            a_max,
            epsilon,
            chi: (1.0 - eta * eta) * chi_max,
            chi_max,
        }
    }

    /// Prescribed final time difference on the l0 > 0 branch.
    pub fn dt_f(&self) -> f64 {
        -self.chi * self.a_max
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSource {
    Caller,
    Interpolated,
    NearestCell,
    WarmStart,
    Analytic,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedCandidate {
    pub l0: f64,
    pub l1: f64,
    pub source: SeedSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelOptSolution {
    /// Positive by convention; the mirrored branch flips the sign of the
    /// time difference.
    pub l0: f64,
    pub l1: f64,
    /// Velocity increment, canonical.
    pub j: f64,
    /// j / (a_max * dL).
    pub j_norm: f64,
    pub n_arcs: usize,
    pub epsilon: f64,
    pub delta_l: f64,
    pub eta: f64,
    pub a_max: f64,
    pub chi: f64,
    pub residual: [f64; 2],
    pub iterations: usize,
    pub attempts: usize,
    pub seed_source: SeedSource,
}

impl FuelOptSolution {
    pub fn rho_at(&self, l: f64) -> f64 {
        switching_rho(l, self.l0, self.l1)
    }

    pub fn throttle_at(&self, l: f64) -> f64 {
        throttle(self.rho_at(l), self.epsilon)
    }

    /// Thrust vector at the given true longitude.
    pub fn control_at(&self, l: f64) -> Result<ControlLVLH> {
        let (ur, ut) = unit_control_direction(l, self.l1, 1.0)?;
        let a = self.a_max * self.throttle_at(l);
        Ok(ControlLVLH::new(a * ur, a * ut))
    }
}

/// Sign structure of the switching function over the arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingProfile {
    /// Zeros of rho, sorted, strictly inside (-dL/2, dL/2).
    pub roots: Vec<f64>,
    /// Sign of rho on each interval between consecutive roots.
    pub signs: Vec<i8>,
}

/// Switching function rho = 1 - |l0| D(L): coast where positive, full
/// thrust where negative.
pub fn switching_rho(l: f64, l0: f64, l1: f64) -> f64 {
    1.0 - l0.abs() * direction_norm(l, l1)
}

/// Smoothed throttle in [0, 1].
pub fn throttle(rho: f64, epsilon: f64) -> f64 {
    0.5 * (1.0 + (-rho / epsilon).tanh())
}

/// Smoothed thrust magnitude.
pub fn smoothed_magnitude(rho: f64, epsilon: f64, a_max: f64) -> f64 {
    a_max * throttle(rho, epsilon)
}

/// The two reduced boundary residuals at the given costate constants. The
/// first is the eccentricity-closure integral per unit a_max; the second is
/// the time-difference mismatch scaled by max(1, chi).
pub fn fuel_residual(l0: f64, l1: f64, problem: &FuelOptProblem) -> Result<[f64; 2]> {
    let half = 0.5 * problem.delta_l;
    let eps = problem.epsilon;
    let breaks = if eps <= SWITCH_SPLIT_EPS {
        rho_roots(l0, l1, 0.0, half)
    } else {
        Vec::new()
    };
    let r1 = 2.0 * quad_adaptive(
        |l| throttle(switching_rho(l, l0, l1), eps) * dg_boundary_numerator(l, l1)
            / direction_norm(l, l1),
        0.0,
        half,
        QUAD_TOL,
        &breaks,
    )?;
    let r2 = 2.0 * quad_adaptive(
        |l| throttle(switching_rho(l, l0, l1), eps) * dt_boundary_numerator(l, l1)
            / direction_norm(l, l1),
        0.0,
        half,
        QUAD_TOL,
        &breaks,
    )?;
    Ok([r1, (r2 - problem.chi) / problem.chi.max(1.0)])
}

/// Velocity increment of the smoothed control profile.
pub fn fuel_cost(l0: f64, l1: f64, problem: &FuelOptProblem) -> Result<f64> {
    let half = 0.5 * problem.delta_l;
    let eps = problem.epsilon;
    let breaks = if eps <= SWITCH_SPLIT_EPS {
        rho_roots(l0, l1, 0.0, half)
    } else {
        Vec::new()
    };
    let j = quad_adaptive(
        |l| throttle(switching_rho(l, l0, l1), eps),
        0.0,
        half,
        QUAD_TOL,
        &breaks,
    )?;
    Ok(2.0 * problem.a_max * j)
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Tried first, in order (caller seed, then atlas candidates).
    pub seeds: Vec<SeedCandidate>,
    /// Random draws after the provided seeds run out.
    pub retry_budget: usize,
    pub rng_seed: u64,
    /// When set, all candidates are tried and the lowest-cost converged
    /// root wins; otherwise the first converged root is returned. The
    /// shooting equations can have several roots with different burn
    /// structures, and only the cheapest is the optimum.
    pub explore: bool,
    pub root: RootSettings,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seeds: Vec::new(),
            retry_budget: 20,
            rng_seed: crate::DEFAULT_RNG_SEED,
            explore: false,
            root: RootSettings { max_iters: 100, ..Default::default() },
        }
    }
}

impl SolveOptions {
    pub fn with_seed(l0: f64, l1: f64) -> Self {
        Self {
            seeds: vec![SeedCandidate { l0, l1, source: SeedSource::Caller }],
            ..Default::default()
        }
    }

    pub fn exploring() -> Self {
        Self { explore: true, ..Default::default() }
    }
}

/// Solves the reduced shooting problem. Seed priority: provided seeds, the
/// analytic short/long-arc estimate, then uniform random draws
/// l0 in [0, 10/dL], l1 in [-4, 4].
pub fn solve_fuel_optimal(
    problem: &FuelOptProblem,
    options: &SolveOptions,
) -> Result<FuelOptSolution> {
    let mut candidates = options.seeds.clone();
    let regime = if problem.delta_l <= 2.0 { Regime::Short } else { Regime::Long };
    if let Ok(est) = analytic_fuel_estimate(problem.delta_l, problem.eta, problem.a_max, regime) {
        candidates.push(SeedCandidate { l0: est.l0, l1: est.l1, source: SeedSource::Analytic });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.rng_seed);
    let total = candidates.len() + options.retry_budget;
    let mut log = String::new();
    let mut best: Option<FuelOptSolution> = None;

    for attempt in 1..=total {
        let cand = if attempt <= candidates.len() {
            candidates[attempt - 1]
        } else {
            SeedCandidate {
                l0: rng.gen_range(0.0..10.0 / problem.delta_l),
                l1: rng.gen_range(-4.0..4.0),
                source: SeedSource::Random,
            }
        };
        match try_seed(problem, cand, attempt, &options.root) {
            Ok(sol) => {
                if !options.explore {
                    return Ok(sol);
                }
                let better = best.as_ref().map_or(true, |b| sol.j < b.j);
                if better {
                    best = Some(sol);
                }
            }
            Err(e) => {
                log.push_str(&format!(
                    "attempt {attempt} ({:?} l0={:.6} l1={:.6}): {e}\n",
                    cand.source, cand.l0, cand.l1
                ));
            }
        }
    }
    best.ok_or(Error::SeedsExhausted { attempts: total, log })
}

fn try_seed(
    problem: &FuelOptProblem,
    cand: SeedCandidate,
    attempt: usize,
    root: &RootSettings,
) -> Result<FuelOptSolution> {
    let sol = hybrid_solve(
        |z: &[f64]| fuel_residual(z[0], z[1], problem).map(|r| r.to_vec()),
        &[cand.l0, cand.l1],
        root,
    )?;
    let l0 = sol.z[0].abs();
    let l1 = sol.z[1];
    let residual = fuel_residual(l0, l1, problem)?;
    if residual[0].abs() > 1e-9 || residual[1].abs() > 1e-9 {
        return Err(Error::NonConvergence {
            reason: format!(
                "post-check failed: residual = ({:.3e}, {:.3e})",
                residual[0], residual[1]
            ),
            residual: residual[0].abs().max(residual[1].abs()),
            iterations: sol.iterations,
        });
    }
    let j = fuel_cost(l0, l1, problem)?;
    let (n_arcs, _) = count_burn_arcs(l0, l1, problem.delta_l);
    Ok(FuelOptSolution {
        l0,
        l1,
        j,
        j_norm: j / (problem.a_max * problem.delta_l),
        n_arcs,
        epsilon: problem.epsilon,
        delta_l: problem.delta_l,
        eta: problem.eta,
        a_max: problem.a_max,
        chi: problem.chi,
        residual,
        iterations: sol.iterations,
        attempts: attempt,
        seed_source: cand.source,
    })
}

/// Re-solves along a geometric epsilon schedule (default one decade per
/// step), warm-starting each step from the previous solution. The final
/// solution approximates the bang-bang control.
pub fn continue_epsilon(
    problem: &FuelOptProblem,
    solution: &FuelOptSolution,
    epsilon_target: f64,
    factor: f64,
) -> Result<FuelOptSolution> {
    if !(epsilon_target > 0.0) || !(factor > 1.0) {
        return Err(Error::Domain(format!(
            "need epsilon_target > 0 and factor > 1, got ({epsilon_target}, {factor})"
        )));
    }
    let mut current = solution.clone();
    let mut eps = solution.epsilon;
    while eps > epsilon_target * (1.0 + 1e-12) {
        let next = (eps / factor).max(epsilon_target);
        current = step_epsilon(problem, &current, eps, next)?;
        eps = next;
    }
    Ok(current)
}

fn step_epsilon(
    problem: &FuelOptProblem,
    current: &FuelOptSolution,
    eps: f64,
    next: f64,
) -> Result<FuelOptSolution> {
    let sub = problem.with_epsilon(next);
    let opts = SolveOptions {
        seeds: vec![SeedCandidate { l0: current.l0, l1: current.l1, source: SeedSource::WarmStart }],
        retry_budget: 0,
        ..Default::default()
    };
    match solve_fuel_optimal(&sub, &opts) {
        Ok(s) => Ok(s),
        Err(_) => {
            // One bisection retry through an intermediate smoothing level.
            let mid_eps = (eps * next).sqrt();
            let mid_problem = problem.with_epsilon(mid_eps);
            let mid = solve_fuel_optimal(&mid_problem, &SolveOptions {
                seeds: vec![SeedCandidate { l0: current.l0, l1: current.l1, source: SeedSource::WarmStart }],
                retry_budget: 0,
                ..Default::default()
            })
            .map_err(|e| Error::Continuation {
                last_good: eps,
                target: next,
                source: Box::new(e),
            })?;
            solve_fuel_optimal(&sub, &SolveOptions {
                seeds: vec![SeedCandidate { l0: mid.l0, l1: mid.l1, source: SeedSource::WarmStart }],
                retry_budget: 0,
                ..Default::default()
            })
            .map_err(|e| Error::Continuation {
                last_good: mid_eps,
                target: next,
                source: Box::new(e),
            })
        }
    }
}

/// Locates the switching structure: all zeros of rho inside the arc and the
/// number of maximal thrust (rho < 0) intervals.
pub fn count_burn_arcs(l0: f64, l1: f64, delta_l: f64) -> (usize, SwitchingProfile) {
    count_burn_arcs_gridded(l0, l1, delta_l, default_scan_points(delta_l))
}

/// Grid-resolution-explicit variant used by the stability check.
pub fn count_burn_arcs_gridded(
    l0: f64,
    l1: f64,
    delta_l: f64,
    n_points: usize,
) -> (usize, SwitchingProfile) {
    let half = 0.5 * delta_l;
    let n = n_points.max(3);
    let mut roots = Vec::new();
    let mut signs = Vec::new();

    let at = |i: usize| -half + delta_l * i as f64 / (n - 1) as f64;
    let mut prev_l = at(0);
    let mut prev = switching_rho(prev_l, l0, l1);
    signs.push(sign_of(prev));
    for i in 1..n {
        let l = at(i);
        let cur = switching_rho(l, l0, l1);
        if prev == 0.0 {
            // Grid point exactly on a root; the sign list already advanced.
        } else if cur.signum() != prev.signum() && cur != 0.0 {
            let root = refine_root(l0, l1, prev_l, l, prev);
            if root > -half && root < half {
                roots.push(root);
                signs.push(sign_of(cur));
            }
        }
        prev = cur;
        prev_l = l;
    }

    let n_arcs = signs.iter().filter(|&&s| s < 0).count();
    (n_arcs, SwitchingProfile { roots, signs })
}

fn sign_of(v: f64) -> i8 {
    if v < 0.0 {
        -1
    } else {
        1
    }
}

fn default_scan_points(delta_l: f64) -> usize {
    ((delta_l * 64.0) as usize).max(2001) | 1
}

fn refine_root(l0: f64, l1: f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let mut s_lo = f_lo.signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-13 * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = switching_rho(mid, l0, l1);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == s_lo {
            lo = mid;
            s_lo = fm.signum();
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zeros of rho on [a, b], for quadrature subdivision.
fn rho_roots(l0: f64, l1: f64, a: f64, b: f64) -> Vec<f64> {
    let n = 2001;
    let mut roots = Vec::new();
    let mut prev_l = a;
    let mut prev = switching_rho(prev_l, l0, l1);
    for i in 1..n {
        let l = a + (b - a) * i as f64 / (n - 1) as f64;
        let cur = switching_rho(l, l0, l1);
        if prev != 0.0 && cur != 0.0 && cur.signum() != prev.signum() {
            roots.push(refine_root(l0, l1, prev_l, l, prev));
        }
        prev = cur;
        prev_l = l;
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelEstimate {
    pub l0: f64,
    pub l1: f64,
    pub j: f64,
}

/// Closed-form costate and cost estimates for short or long arcs. The
/// switch condition rho = 0 at L = +/- eta dL / 2 gives l0 = 2/(eta dL) on
/// short arcs and 2/(3 eta dL) on long ones; the cost is (1 - eta) a_max dL
/// in both regimes.
pub fn analytic_fuel_estimate(
    delta_l: f64,
    eta: f64,
    a_max: f64,
    regime: Regime,
) -> Result<FuelEstimate> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1), got {eta}")));
    }
    let j = (1.0 - eta) * a_max * delta_l;
    match regime {
        Regime::Short => Ok(FuelEstimate { l0: 2.0 / (eta * delta_l), l1: 2.0, j }),
        Regime::Long => {
            let l1 = timeopt::solve_lambda1(delta_l)?.x;
            Ok(FuelEstimate { l0: 2.0 / (3.0 * eta * delta_l), l1, j })
        }
    }
}
