//! Globally adaptive quadrature built on the 15-point Gauss-Kronrod rule,
//! with a user-supplied breakpoint list at which the initial subdivision is
//! forced (integrands here are smooth except at smoothed control switches).

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights; the
// even-indexed abscissae form the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

const MAX_SEGMENTS: usize = 20_000;

struct Panel {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
    res_abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over [a, b] so that the absolute error is bounded by
/// `tol * max(1, |result|)`. `b < a` is allowed and flips the sign.
pub fn quad_adaptive<F>(f: F, a: f64, b: f64, tol: f64, breakpoints: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut knots: Vec<f64> = vec![lo];
    knots.extend(breakpoints.iter().copied().filter(|&p| p > lo && p < hi));
    knots.push(hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let nonfinite = |x: f64, y: f64| Error::Quadrature {
        a,
        b,
        err: f64::INFINITY,
        tol: tol * x.abs().max(1.0).max(y.abs()),
    };

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut res_abs_total = 0.0;
    for w in knots.windows(2) {
        let (val, err, res_abs) = qk15(&f, w[0], w[1]);
        if !val.is_finite() || !err.is_finite() {
            return Err(nonfinite(val, 0.0));
        }
        total += val;
        total_err += err;
        res_abs_total += res_abs;
        heap.push(Panel { err, a: w[0], b: w[1], val, res_abs });
    }

    let mut n_panels = knots.len() - 1;
    loop {
        let target = tol * total.abs().max(1.0);
        let floor = 50.0 * f64::EPSILON * res_abs_total;
        if total_err <= target.max(floor) {
            return Ok(sign * total);
        }
        if n_panels >= MAX_SEGMENTS {
            return Err(Error::Quadrature { a, b, err: total_err, tol: target });
        }
        let worst = heap.pop().expect("heap cannot be empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval too narrow to split further.
            return Err(Error::Quadrature { a, b, err: total_err, tol: target });
        }
        let (v1, e1, r1) = qk15(&f, worst.a, mid);
        let (v2, e2, r2) = qk15(&f, mid, worst.b);
        if !(v1 + v2).is_finite() || !(e1 + e2).is_finite() {
            return Err(nonfinite(v1 + v2, total));
        }
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        res_abs_total += r1 + r2 - worst.res_abs;
        heap.push(Panel { err: e1, a: worst.a, b: mid, val: v1, res_abs: r1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, val: v2, res_abs: r2 });
        n_panels += 1;
    }
}

/// One Gauss-Kronrod 7-15 evaluation: returns (integral, error estimate,
/// integral of |f|).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    // The embedded Gauss rule includes the center point.
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv = [[0.0f64; 2]; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = [f1, f2];
        let fsum = f1 + f2;
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j][0] - mean).abs() + (fv[j][1] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    let res_kronrod = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    // QUADPACK-style error rescaling.
    let mut scaled_err = err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        scaled_err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled_err = scaled_err.max(50.0 * f64::EPSILON * res_abs);
    }
    (res_kronrod, scaled_err, res_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sine_over_half_period() {
        let v = quad_adaptive(|x| x.sin(), 0.0, PI, 1e-12, &[]).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn linear_integrand() {
        let v = quad_adaptive(|x| 3.0 * x, 0.0, 1.0, 1e-12, &[]).unwrap();
        assert_relative_eq!(v, 1.5, max_relative = 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = quad_adaptive(|x| x.sin(), PI, 0.0, 1e-12, &[]).unwrap();
        assert_relative_eq!(v, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn breakpoint_resolves_kink() {
        let f = |x: f64| (x - 0.5).abs();
        let v = quad_adaptive(f, 0.0, 1.0, 1e-13, &[0.5]).unwrap();
        assert_relative_eq!(v, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn sharp_tanh_switch() {
        // Very sharp smoothed switch; adaptive subdivision must resolve it.
        let eps = 1e-8;
        let f = |x: f64| 0.5 * (1.0 + ((x - 0.3) / eps).tanh());
        let v = quad_adaptive(f, 0.0, 1.0, 1e-11, &[0.3]).unwrap();
        assert_relative_eq!(v, 0.7, max_relative = 1e-10);
    }

    #[test]
    fn divergent_integrand_errors_out() {
        // Non-integrable interior singularity: subdivision can never settle.
        let v = quad_adaptive(|x: f64| 1.0 / (x - 0.5).abs(), 0.0, 1.0, 1e-13, &[]);
        assert!(matches!(v, Err(Error::Quadrature { .. })));
    }
}
