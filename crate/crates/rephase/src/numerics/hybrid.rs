//! Trust-region dogleg solver for small square nonlinear systems (n = 2 or
//! 4 here). A fresh Jacobian is taken every iteration — analytic when
//! supplied, forward differences otherwise — and steps are controlled in a
//! column-scaled norm so that shooting variables of very different
//! magnitudes share one radius.

use crate::error::{Error, Result};
use crate::numerics::RootSettings;

#[derive(Debug, Clone)]
pub struct HybridSolution {
    pub z: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_inf: f64,
    /// Trial steps evaluated, accepted or not.
    pub iterations: usize,
    pub n_fev: usize,
}

/// Solves F(z) = 0 with a forward-difference Jacobian.
pub fn hybrid_solve<F>(f: F, z0: &[f64], settings: &RootSettings) -> Result<HybridSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    solve_impl(f, None::<fn(&[f64]) -> Result<Vec<f64>>>, z0, settings)
}

/// Solves F(z) = 0 with a caller-supplied Jacobian (row-major, n*n).
pub fn hybrid_solve_with_jacobian<F, J>(
    f: F,
    jac: J,
    z0: &[f64],
    settings: &RootSettings,
) -> Result<HybridSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    solve_impl(f, Some(jac), z0, settings)
}

fn solve_impl<F, J>(
    mut f: F,
    mut jac: Option<J>,
    z0: &[f64],
    settings: &RootSettings,
) -> Result<HybridSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = z0.len();
    let mut z = z0.to_vec();
    let mut fz = f(&z)?;
    let mut n_fev = 1usize;
    if fz.len() != n {
        return Err(Error::Domain(format!(
            "residual dimension {} does not match variable dimension {n}",
            fz.len()
        )));
    }
    check_finite(&fz)?;
    if inf_norm(&fz) <= settings.residual_tol {
        return Ok(HybridSolution {
            residual_inf: inf_norm(&fz),
            z,
            residual: fz,
            iterations: 0,
            n_fev,
        });
    }

    let mut scale = vec![1.0f64; n];
    let mut radius = f64::NAN; // set once the first Jacobian is known
    let mut best_rnorm = inf_norm(&fz);

    for iter in 1..=settings.max_iters {
        // Jacobian, row-major.
        let j = match &mut jac {
            Some(jf) => {
                let j = jf(&z)?;
                if j.len() != n * n {
                    return Err(Error::Domain(format!(
                        "jacobian has {} entries, expected {}",
                        j.len(),
                        n * n
                    )));
                }
                j
            }
            None => {
                let j = fd_jacobian(&mut f, &z, &fz, &mut n_fev)?;
                n_fev += 0; // counted inside
                j
            }
        };

        // MINPACK-style column scaling: keep the largest column norm seen.
        for c in 0..n {
            let mut s = 0.0;
            for r in 0..n {
                s += j[r * n + c] * j[r * n + c];
            }
            let s = s.sqrt();
            if iter == 1 {
                scale[c] = if s > 0.0 { s } else { 1.0 };
            } else if s > scale[c] {
                scale[c] = s;
            }
        }
        if radius.is_nan() {
            let zn = scaled_norm(&z, &scale);
            radius = if zn > 0.0 {
                settings.initial_trust_factor * zn
            } else {
                settings.initial_trust_factor
            };
        }

        // g = J^T F; Newton step from the linear solve.
        let mut g = vec![0.0; n];
        for c in 0..n {
            for r in 0..n {
                g[c] += j[r * n + c] * fz[r];
            }
        }
        let newton = solve_linear(&j, &fz, n);

        let step = dogleg(&j, &g, newton.as_deref(), &scale, radius, n);
        let step_norm = scaled_norm(&step, &scale);
        if step_norm == 0.0 || !step_norm.is_finite() {
            return Err(Error::NonConvergence {
                reason: "degenerate dogleg step".into(),
                residual: inf_norm(&fz),
                iterations: iter,
            });
        }

        let trial: Vec<f64> = z.iter().zip(&step).map(|(a, b)| a + b).collect();
        let f_trial = f(&trial);
        n_fev += 1;

        // Predicted reduction of |F|^2 from the linear model.
        let mut pred = 0.0f64;
        let fsq = dot(&fz, &fz);
        {
            let mut lin = fz.clone();
            for r in 0..n {
                for c in 0..n {
                    lin[r] += j[r * n + c] * step[c];
                }
            }
            pred = pred.max(fsq - dot(&lin, &lin));
        }

        let ratio = match &f_trial {
            Ok(ft) if ft.iter().all(|v| v.is_finite()) => {
                let actual = fsq - dot(ft, ft);
                if pred > 0.0 {
                    actual / pred
                } else if actual > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 0.0, // failed trial point: treat as a rejected step
        };

        if ratio >= 1e-4 {
            z = trial;
            fz = f_trial.expect("accepted trial evaluated");
            let rn = inf_norm(&fz);
            best_rnorm = best_rnorm.min(rn);
            if rn <= settings.residual_tol {
                return Ok(HybridSolution {
                    residual_inf: rn,
                    z,
                    residual: fz,
                    iterations: iter,
                    n_fev,
                });
            }
        }

        if ratio < 0.25 {
            radius = 0.5 * step_norm;
        } else if ratio > 0.75 && step_norm >= 0.9 * radius {
            radius *= 2.0;
        }
        if radius < 1e-14 * scaled_norm(&z, &scale).max(1.0) {
            return Err(Error::NonConvergence {
                reason: "trust region collapsed".into(),
                residual: inf_norm(&fz),
                iterations: iter,
            });
        }
    }

    Err(Error::NonConvergence {
        reason: format!("iteration limit {} reached", settings.max_iters),
        residual: inf_norm(&fz),
        iterations: settings.max_iters,
    })
}

/// Dogleg step in the column-scaled norm: full Newton when it fits,
/// otherwise the blend of the scaled Cauchy point and the Newton point on
/// the trust-region boundary.
fn dogleg(
    j: &[f64],
    g: &[f64],
    newton: Option<&[f64]>,
    scale: &[f64],
    radius: f64,
    n: usize,
) -> Vec<f64> {
    if let Some(pn) = newton {
        if scaled_norm(pn, scale) <= radius {
            return pn.to_vec();
        }
    }

    // Steepest descent in scaled coordinates: g_hat_i = g_i / d_i.
    let g_hat: Vec<f64> = g.iter().zip(scale).map(|(gi, di)| gi / di).collect();
    let g_hat_norm = norm(&g_hat);
    if g_hat_norm == 0.0 {
        return match newton {
            Some(pn) => cap_to_radius(pn, scale, radius),
            None => vec![0.0; n],
        };
    }
    // J * D^(-1) * g_hat
    let mut jg = vec![0.0; n];
    for r in 0..n {
        for c in 0..n {
            jg[r] += j[r * n + c] * g_hat[c] / scale[c];
        }
    }
    let jg_sq = dot(&jg, &jg);
    if jg_sq == 0.0 {
        let p: Vec<f64> = g_hat
            .iter()
            .zip(scale)
            .map(|(gh, d)| -radius * gh / (g_hat_norm * d))
            .collect();
        return p;
    }
    let alpha = g_hat_norm * g_hat_norm / jg_sq;
    // Cauchy point in unscaled coordinates.
    let cauchy: Vec<f64> = g_hat
        .iter()
        .zip(scale)
        .map(|(gh, d)| -alpha * gh / d)
        .collect();
    let cauchy_norm = scaled_norm(&cauchy, scale);
    if cauchy_norm >= radius {
        return cauchy.iter().map(|c| c * radius / cauchy_norm).collect();
    }
    let pn = match newton {
        Some(pn) => pn,
        None => return cauchy,
    };

    // tau on the segment cauchy -> newton with scaled norm = radius.
    let d: Vec<f64> = pn.iter().zip(&cauchy).map(|(a, b)| a - b).collect();
    let mut aa = 0.0;
    let mut bb = 0.0;
    let mut cc = -(radius * radius);
    for i in 0..n {
        let ds = d[i] * scale[i];
        let cs = cauchy[i] * scale[i];
        aa += ds * ds;
        bb += 2.0 * cs * ds;
        cc += cs * cs;
    }
    let disc = (bb * bb - 4.0 * aa * cc).max(0.0);
    let tau = if aa > 0.0 {
        ((-bb + disc.sqrt()) / (2.0 * aa)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    cauchy
        .iter()
        .zip(&d)
        .map(|(c, di)| c + tau * di)
        .collect()
}

fn cap_to_radius(p: &[f64], scale: &[f64], radius: f64) -> Vec<f64> {
    let pn = scaled_norm(p, scale);
    if pn <= radius || pn == 0.0 {
        p.to_vec()
    } else {
        p.iter().map(|v| v * radius / pn).collect()
    }
}

fn fd_jacobian<F>(f: &mut F, z: &[f64], fz: &[f64], n_fev: &mut usize) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = z.len();
    let mut j = vec![0.0; n * n];
    let mut zp = z.to_vec();
    for c in 0..n {
        let h = f64::EPSILON.sqrt() * z[c].abs().max(1.0);
        zp[c] = z[c] + h;
        let fp = f(&zp)?;
        *n_fev += 1;
        zp[c] = z[c];
        for r in 0..n {
            j[r * n + c] = (fp[r] - fz[r]) / h;
        }
    }
    Ok(j)
}

/// Gaussian elimination with partial pivoting; returns None on singularity.
fn solve_linear(j: &[f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = j.to_vec();
    let mut b: Vec<f64> = rhs.iter().map(|v| -v).collect();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for c in col + 1..n {
            acc -= a[col * n + c] * b[c];
        }
        b[col] = acc / a[col * n + col];
        if !b[col].is_finite() {
            return None;
        }
    }
    Some(b)
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite residual at starting point".into()));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scaled_norm(a: &[f64], scale: &[f64]) -> f64 {
    a.iter()
        .zip(scale)
        .map(|(x, d)| (x * d) * (x * d))
        .sum::<f64>()
        .sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shift_system_converges_in_one_iteration() {
        // F(z) = z - c with the exact Jacobian and a start close enough that
        // the full Newton step fits inside the initial trust region.
        let c = [3.0, 4.0];
        let sol = hybrid_solve_with_jacobian(
            |z: &[f64]| Ok(vec![z[0] - c[0], z[1] - c[1]]),
            |_z: &[f64]| Ok(vec![1.0, 0.0, 0.0, 1.0]),
            &[3.02, 4.02],
            &RootSettings::default(),
        )
        .unwrap();
        assert_eq!(sol.iterations, 1);
        assert_relative_eq!(sol.z[0], 3.0, max_relative = 1e-10);
        assert_relative_eq!(sol.z[1], 4.0, max_relative = 1e-10);

        // The forward-difference path lands within Jacobian roundoff of the
        // root; one extra polish step at most.
        let sol = hybrid_solve(
            |z: &[f64]| Ok(vec![z[0] - c[0], z[1] - c[1]]),
            &[3.02, 4.02],
            &RootSettings::default(),
        )
        .unwrap();
        assert!(sol.iterations <= 2, "iterations = {}", sol.iterations);
        assert_relative_eq!(sol.z[0], 3.0, max_relative = 1e-10);
    }

    #[test]
    fn linear_system_with_exact_jacobian_converges_in_one_step() {
        // A z = b as a residual; Newton is exact for linear systems.
        let a = [2.0, 1.0, 1.0, 3.0];
        let b = [10.0, 15.0];
        let f = |z: &[f64]| {
            Ok(vec![
                a[0] * z[0] + a[1] * z[1] - b[0],
                a[2] * z[0] + a[3] * z[1] - b[1],
            ])
        };
        let jac = |_z: &[f64]| Ok(a.to_vec());
        // Exact solution is (3, 4); start nearby so the step fits.
        let sol = hybrid_solve_with_jacobian(f, jac, &[3.02, 3.98], &RootSettings::default())
            .unwrap();
        assert_eq!(sol.iterations, 1);
        assert_relative_eq!(sol.z[0], 3.0, max_relative = 1e-10);
        assert_relative_eq!(sol.z[1], 4.0, max_relative = 1e-10);
    }

    #[test]
    fn rosenbrock_like_system() {
        let f = |z: &[f64]| Ok(vec![10.0 * (z[1] - z[0] * z[0]), 1.0 - z[0]]);
        let sol = hybrid_solve(f, &[0.8, 0.9], &RootSettings { max_iters: 200, ..Default::default() }).unwrap();
        assert_relative_eq!(sol.z[0], 1.0, max_relative = 1e-9);
        assert_relative_eq!(sol.z[1], 1.0, max_relative = 1e-9);
    }

    #[test]
    fn rootless_system_reports_nonconvergence() {
        let f = |z: &[f64]| Ok(vec![z[0] * z[0] + 1.0, z[1]]);
        let err = hybrid_solve(f, &[1.0, 1.0], &RootSettings::default()).unwrap_err();
        match err {
            Error::NonConvergence { residual, .. } => assert!(residual > 0.1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn failed_trial_points_shrink_the_region() {
        // Residual blows up left of z = 0.5; the solver must back off and
        // still find the root at z = (1, 1).
        let f = |z: &[f64]| {
            if z[0] < 0.5 {
                return Err(Error::Domain("out of range".into()));
            }
            Ok(vec![(z[0] - 1.0) * 3.0, z[1] - 1.0])
        };
        let sol = hybrid_solve(f, &[0.6, 0.6], &RootSettings { max_iters: 100, ..Default::default() }).unwrap();
        assert_relative_eq!(sol.z[0], 1.0, max_relative = 1e-9);
    }
}
