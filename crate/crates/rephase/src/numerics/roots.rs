//! Scalar root finding: safeguarded Newton iteration that keeps a bracket
//! and falls back to bisection whenever a Newton step leaves it.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootSettings {
    pub residual_tol: f64,
    pub max_iters: usize,
    /// Initial trust radius of the dogleg solver as a fraction of the
    /// scaled norm of the starting point.
    pub initial_trust_factor: f64,
}

impl Default for RootSettings {
    fn default() -> Self {
        Self {
            residual_tol: 1e-11,
            max_iters: 50,
            initial_trust_factor: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScalarRoot {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

/// Finds a root of `f` starting from `x0`, bracketing automatically by
/// geometric probing around the start point. Intended for functions that are
/// monotone on the search interval, where a sign change is guaranteed to
/// exist on one side.
pub fn newton_scalar<F, G>(f: F, df: G, x0: f64, settings: &RootSettings) -> Result<ScalarRoot>
where
    F: FnMut(f64) -> Result<f64>,
    G: FnMut(f64) -> Result<f64>,
{
    let mut f = f;
    let f0 = f(x0)?;
    if f0.abs() <= settings.residual_tol {
        return Ok(ScalarRoot { x: x0, f: f0, iterations: 0 });
    }
    let (bracket, evals) = find_bracket(&mut f, x0, f0)?;
    let mut root = newton_scalar_bracketed(f, df, x0, bracket, settings)?;
    root.iterations += evals;
    Ok(root)
}

/// Safeguarded Newton on a known bracket `(lo, hi)` with `f(lo)` and `f(hi)`
/// of opposite sign.
pub fn newton_scalar_bracketed<F, G>(
    mut f: F,
    mut df: G,
    x0: f64,
    (mut lo, mut hi): (f64, f64),
    settings: &RootSettings,
) -> Result<ScalarRoot>
where
    F: FnMut(f64) -> Result<f64>,
    G: FnMut(f64) -> Result<f64>,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(ScalarRoot { x: lo, f: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(ScalarRoot { x: hi, f: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::RootFind(format!(
            "no sign change on bracket [{lo}, {hi}]: f = ({f_lo:.3e}, {f_hi:.3e})"
        )));
    }

    let mut x = x0.clamp(lo, hi);
    let mut fx = f(x)?;
    for iter in 1..=settings.max_iters {
        if fx.abs() <= settings.residual_tol {
            return Ok(ScalarRoot { x, f: fx, iterations: iter - 1 });
        }
        // Shrink the bracket with the fresh sample.
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }

        let slope = df(x)?;
        let newton = x - fx / slope;
        x = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let fx = f(x)?;
            if fx.abs() <= settings.residual_tol {
                return Ok(ScalarRoot { x, f: fx, iterations: iter });
            }
            return Err(Error::RootFind(format!(
                "bracket collapsed at x = {x} with |f| = {:.3e} above tolerance {:.3e}",
                fx.abs(),
                settings.residual_tol
            )));
        }
        fx = f(x)?;
    }
    Err(Error::RootFind(format!(
        "no convergence after {} iterations (|f| = {:.3e} at x = {x})",
        settings.max_iters,
        fx.abs()
    )))
}

/// Plain bisection to a relative x-tolerance; used where only a bracket and
/// continuity are available.
pub fn bisect<F>(mut f: F, (mut lo, mut hi): (f64, f64), x_rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo.signum() == f(hi).signum() {
        return Err(Error::RootFind(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_rel_tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        if f(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn find_bracket<F>(f: &mut F, x0: f64, f0: f64) -> Result<((f64, f64), usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut step = 0.1 * x0.abs().max(1.0);
    let mut evals = 0usize;
    for _ in 0..60 {
        for x in [x0 - step, x0 + step] {
            let fx = f(x)?;
            evals += 1;
            if fx == 0.0 || fx.signum() != f0.signum() {
                return Ok(((x0.min(x), x0.max(x)), evals));
            }
        }
        step *= 2.0;
    }
    Err(Error::RootFind(format!(
        "no bracket found around x0 = {x0} after 60 doublings"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sqrt_two() {
        let s = RootSettings::default();
        let r = newton_scalar(
            |x| Ok(x * x - 2.0),
            |x| Ok(2.0 * x),
            1.0,
            &s,
        )
        .unwrap();
        assert_relative_eq!(r.x, 2.0f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn sinh_equation_root_exceeds_three() {
        // sinh y = k y with k = 4 / 0.5 = 8; the nonzero root sits well
        // above 3.
        let k = 8.0;
        let s = RootSettings::default();
        let r = newton_scalar(
            |y: f64| Ok(y.sinh() - k * y),
            |y: f64| Ok(y.cosh() - k),
            3.0,
            &s,
        )
        .unwrap();
        assert!(r.x > 3.0, "root {} should exceed 3", r.x);
        assert_relative_eq!(r.x.sinh(), k * r.x, max_relative = 1e-10);
    }

    #[test]
    fn bracketed_falls_back_to_bisection() {
        // Deliberately bad derivative forces bisection steps.
        let s = RootSettings::default();
        let r = newton_scalar_bracketed(
            |x| Ok(x * x * x - 8.0),
            |_x| Ok(1e-30),
            1.0,
            (0.0, 10.0),
            &s,
        )
        .unwrap();
        assert_relative_eq!(r.x, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn missing_sign_change_is_an_error() {
        let s = RootSettings::default();
        let r = newton_scalar_bracketed(|x| Ok(x * x + 1.0), |x| Ok(2.0 * x), 0.5, (0.0, 1.0), &s);
        assert!(r.is_err());
    }
}
