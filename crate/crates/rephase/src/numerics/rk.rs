//! Dormand-Prince 5(4) embedded pair with adaptive step size, FSAL, fourth
//! order dense output, and a breakpoint list at which steps are forced to
//! land exactly (used to split integrands at control switches).
//!
//! Backward spans (b < a) are supported; the right-hand side may fail, which
//! aborts the integration with the last accepted state attached.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Forces the first trial step of every segment; `None` uses a heuristic.
    pub initial_step: Option<f64>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-13,
            max_steps: 2_000_000,
            initial_step: None,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::Domain(format!(
                    "{name} must lie in (0, 1e-2], got {tol}"
                )));
            }
        }
        Ok(())
    }
}

// Butcher tableau, 7 stages, FSAL.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step's continuous extension: five coefficients per state.
#[derive(Debug, Clone)]
struct DenseStep {
    t0: f64,
    h: f64,
    cont: Vec<[f64; 5]>,
}

impl DenseStep {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let th1 = 1.0 - theta;
        for (o, c) in out.iter_mut().zip(&self.cont) {
            *o = c[0] + theta * (c[1] + th1 * (c[2] + theta * (c[3] + th1 * c[4])));
        }
    }
}

/// Piecewise-polynomial solution supporting evaluation anywhere in the span.
#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<DenseStep>,
    pub t_start: f64,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub n_steps: usize,
    pub n_rhs_evals: usize,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.y_end.len()
    }

    /// Evaluates the dense output at `t`, which must lie within the span
    /// (a relative slack of 1e-12 is tolerated at the ends).
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.y_end.len()];
        self.sample_into(t, &mut out);
        out
    }

    pub fn sample_into(&self, t: f64, out: &mut [f64]) {
        let fwd = self.t_end >= self.t_start;
        let lo = if fwd { self.t_start } else { self.t_end };
        let hi = if fwd { self.t_end } else { self.t_start };
        let slack = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
        assert!(
            t >= lo - slack && t <= hi + slack,
            "sample point {t} outside trajectory span [{lo}, {hi}]"
        );
        // Steps are ordered along the direction of integration.
        let idx = self
            .steps
            .partition_point(|s| {
                if fwd {
                    s.t0 + s.h < t
                } else {
                    s.t0 + s.h > t
                }
            })
            .min(self.steps.len() - 1);
        self.steps[idx].eval_into(t, out);
    }
}

enum Sink {
    FinalOnly,
    Dense(Vec<DenseStep>),
}

/// Integrates `rhs` over `span` and returns the final state.
pub fn integrate<F>(
    rhs: F,
    span: (f64, f64),
    y0: &[f64],
    breakpoints: &[f64],
    settings: &IntegratorSettings,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let (y, _, _, _) = run(rhs, span, y0, breakpoints, settings, false)?;
    Ok(y)
}

/// Integrates `rhs` over `span` keeping the dense output of every step.
pub fn integrate_dense<F>(
    rhs: F,
    span: (f64, f64),
    y0: &[f64],
    breakpoints: &[f64],
    settings: &IntegratorSettings,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let (y_end, steps, n_steps, n_rhs_evals) = run(rhs, span, y0, breakpoints, settings, true)?;
    Ok(Trajectory {
        steps: steps.expect("dense requested"),
        t_start: span.0,
        t_end: span.1,
        y_end,
        n_steps,
        n_rhs_evals,
    })
}

#[allow(clippy::type_complexity)]
fn run<F>(
    mut rhs: F,
    (a, b): (f64, f64),
    y0: &[f64],
    breakpoints: &[f64],
    settings: &IntegratorSettings,
    dense: bool,
) -> Result<(Vec<f64>, Option<Vec<DenseStep>>, usize, usize)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    settings.validate()?;
    let n = y0.len();
    if a == b {
        let steps = dense.then(|| {
            vec![DenseStep {
                t0: a,
                h: 1.0, // never evaluated away from t0
                cont: y0.iter().map(|&y| [y, 0.0, 0.0, 0.0, 0.0]).collect(),
            }]
        });
        return Ok((y0.to_vec(), steps, 0, 0));
    }

    let dir = (b - a).signum();
    let mut knots: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| (p - a) * dir > 0.0 && (b - p) * dir > 0.0)
        .collect();
    knots.sort_by(|x, y| if dir > 0.0 { x.total_cmp(y) } else { y.total_cmp(x) });
    knots.dedup();
    knots.push(b);

    let mut sink = if dense {
        Sink::Dense(Vec::new())
    } else {
        Sink::FinalOnly
    };
    let mut y = y0.to_vec();
    let mut t = a;
    let mut n_steps = 0usize;
    let mut n_evals = 0usize;

    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    let fail = |reason: String, at: f64, steps: usize, last: &[f64]| Error::Integration {
        reason,
        at,
        steps,
        last_state: last.to_vec(),
    };

    for &seg_end in &knots {
        // FSAL chain restarts each segment: the RHS may be discontinuous at
        // a breakpoint.
        rhs(t, &y, &mut k[0])?;
        n_evals += 1;

        let seg_len = (seg_end - t).abs();
        if seg_len == 0.0 {
            continue;
        }
        let mut h = match settings.initial_step {
            Some(h0) => h0.abs().min(seg_len) * dir,
            None => initial_step_guess(&y, &k[0], seg_len, settings) * dir,
        };

        loop {
            if n_steps >= settings.max_steps {
                return Err(fail("max_steps exceeded".into(), t, n_steps, &y));
            }
            if h.abs() < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(fail(format!("step size underflow (h = {h:.3e})"), t, n_steps, &y));
            }
            if (t + h - seg_end) * dir > 0.0 {
                h = seg_end - t;
            }

            // Stages 2..6.
            for (stage, coeffs) in [
                (1usize, &A2[..]),
                (2, &A3[..]),
                (3, &A4[..]),
                (4, &A5[..]),
                (5, &A6[..]),
            ] {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, &c) in coeffs.iter().enumerate() {
                        acc += c * k[j][i];
                    }
                    y_stage[i] = y[i] + h * acc;
                }
                rhs(t + C[stage] * h, &y_stage, &mut k[stage])?;
                n_evals += 1;
            }
            // 5th-order solution, then the FSAL stage at the step end.
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..6 {
                    acc += B[j] * k[j][i];
                }
                y_new[i] = y[i] + h * acc;
            }
            rhs(t + h, &y_new, &mut k[6])?;
            n_evals += 1;
            n_steps += 1;

            let mut err_sq = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for j in 0..7 {
                    e += E[j] * k[j][i];
                }
                e *= h;
                let sc = settings.abs_tol + settings.rel_tol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / sc) * (e / sc);
            }
            let err = (err_sq / n as f64).sqrt();
            if !err.is_finite() {
                return Err(fail("non-finite error estimate".into(), t, n_steps, &y));
            }

            if err <= 1.0 {
                if let Sink::Dense(steps) = &mut sink {
                    let mut cont = Vec::with_capacity(n);
                    for i in 0..n {
                        let ydiff = y_new[i] - y[i];
                        let bspl = h * k[0][i] - ydiff;
                        let mut d_acc = 0.0;
                        for j in 0..7 {
                            d_acc += D[j] * k[j][i];
                        }
                        cont.push([y[i], ydiff, bspl, ydiff - h * k[6][i] - bspl, h * d_acc]);
                    }
                    steps.push(DenseStep { t0: t, h, cont });
                }
                t += h;
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6); // FSAL
                if (seg_end - t) * dir <= 0.0 {
                    break;
                }
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                h *= fac;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                h *= fac;
            }
        }
        t = seg_end;
    }

    let steps = match sink {
        Sink::Dense(s) => Some(s),
        Sink::FinalOnly => None,
    };
    Ok((y, steps, n_steps, n_evals))
}

fn initial_step_guess(y: &[f64], f0: &[f64], seg_len: f64, s: &IntegratorSettings) -> f64 {
    let n = y.len() as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = s.abs_tol + s.rel_tol * yi.abs();
        d0 += (yi / sc) * (yi / sc);
        d1 += (fi / sc) * (fi / sc);
    }
    d0 = (d0 / n).sqrt();
    d1 = (d1 / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * seg_len.max(1e-6)
    } else {
        0.01 * d0 / d1
    };
    h0.min(seg_len)
}
