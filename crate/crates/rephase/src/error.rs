//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input rejected before any computation ran.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive integration gave up; carries the state at the failure point.
    #[error("integration failed at L = {at} after {steps} steps: {reason}")]
    Integration {
        reason: String,
        at: f64,
        steps: usize,
        last_state: Vec<f64>,
    },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge on [{a}, {b}]: error {err:.3e} > tolerance {tol:.3e}")]
    Quadrature { a: f64, b: f64, err: f64, tol: f64 },

    #[error("root finding failed: {0}")]
    RootFind(String),

    /// Trust-region solver stalled or ran out of iterations.
    #[error("solver did not converge: {reason} (residual {residual:.3e} after {iterations} iterations)")]
    NonConvergence {
        reason: String,
        residual: f64,
        iterations: usize,
    },

    /// The optimal-control direction denominator vanished.
    #[error("singular control direction at L = {0}")]
    SingularDirection(f64),

    /// Every seed candidate failed; the log lists one line per attempt.
    #[error("all {attempts} seed attempts failed:\n{log}")]
    SeedsExhausted { attempts: usize, log: String },

    /// Smoothing continuation could not reach the target epsilon.
    #[error("continuation stalled at epsilon = {last_good:.3e} (target {target:.3e}): {source}")]
    Continuation {
        last_good: f64,
        target: f64,
        source: Box<Error>,
    },

    /// The requested transfer cannot be flown in the given arc.
    #[error("infeasible problem: {reason} (minimum true-longitude difference {min_delta_l})")]
    Infeasible { reason: String, min_delta_l: f64 },

    /// Atlas file did not match the expected schema.
    #[error("{path}:{line}: {msg}")]
    AtlasParse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("atlas metadata error: {0}")]
    AtlasMeta(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
