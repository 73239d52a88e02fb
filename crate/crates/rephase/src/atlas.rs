//! Solution atlases: the l1/chi curve over the true-longitude difference,
//! and the (dL, eta) contour grids of the propellant-optimal costates and
//! normalized cost. Grids persist as CSV with a JSON metadata sidecar and
//! answer warm-start queries with discontinuity-aware interpolation.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuelopt::{
    analytic_fuel_estimate, solve_fuel_optimal, FuelOptProblem, Regime, SeedCandidate, SeedSource,
    SolveOptions,
};
use crate::timeopt;

/// Adjacent cells whose l1 differ by more than this are treated as lying on
/// different solution branches (a costate mutation) and are never blended.
pub const MUTATION_L1_JUMP: f64 = 0.5;

const SCHEMA_VERSION: u32 = 1;
const FUEL_COLUMNS: &str = "dL,eta,l0_times_dL,l1,J_norm,n_arcs,converged,epsilon";
const TIME_COLUMNS: &str = "dL,l1,chi,converged";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtlasMeta {
    pub schema_version: u32,
    pub kind: String,
    pub epsilon: f64,
    pub code_version: String,
    pub rng_seed: u64,
    pub seed_policy: String,
    pub dl_axis: Vec<f64>,
    pub eta_axis: Vec<f64>,
    pub convergence_rate: f64,
}

/// One converged (or failed) propellant-optimal solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct AtlasCell {
    /// l0 * dL; the product varies smoothly across the grid while l0 itself
    /// collapses with growing dL.
    pub l0_times_dl: f64,
    pub l1: f64,
    pub j_norm: f64,
    pub n_arcs: usize,
    pub converged: bool,
    pub epsilon: f64,
}

impl AtlasCell {
    fn failed(epsilon: f64) -> Self {
        Self {
            l0_times_dl: f64::NAN,
            l1: f64::NAN,
            j_norm: f64::NAN,
            n_arcs: 0,
            converged: false,
            epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtlasGrid {
    pub dl_axis: Vec<f64>,
    pub eta_axis: Vec<f64>,
    /// Row-major over (dl index, eta index).
    pub cells: Vec<AtlasCell>,
    pub meta: AtlasMeta,
}

impl AtlasGrid {
    pub fn cell(&self, i: usize, j: usize) -> &AtlasCell {
        &self.cells[i * self.eta_axis.len() + j]
    }

    pub fn convergence_rate(&self) -> f64 {
        let ok = self.cells.iter().filter(|c| c.converged).count();
        ok as f64 / self.cells.len() as f64
    }
}

/// One point of the time-optimal sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TimeCurvePoint {
    pub delta_l: f64,
    pub l1: f64,
    pub chi: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeCurve {
    pub points: Vec<TimeCurvePoint>,
    pub meta: AtlasMeta,
}

/// Sweeps the time-optimal curve over [dl_min, dl_max] with the given step,
/// warm-starting each root from the previous one. Per-point failures are
/// recorded, not fatal.
pub fn generate_time_atlas(dl_range: (f64, f64), step: f64) -> Result<TimeCurve> {
    let (lo, hi) = dl_range;
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(Error::Domain(format!(
            "invalid sweep spec: range ({lo}, {hi}), step {step}"
        )));
    }
    let n = ((hi - lo) / step).round() as usize + 1;
    let mut points = Vec::with_capacity(n);
    let mut warm = timeopt::approx_lambda1(lo);
    for i in 0..n {
        let dl = lo + step * i as f64;
        if dl > hi * (1.0 + 1e-12) {
            break;
        }
        match timeopt::solve_lambda1_seeded(dl, warm)
            .and_then(|r| timeopt::f2(dl, r.x).map(|chi| (r.x, chi)))
        {
            Ok((l1, chi)) => {
                warm = l1;
                points.push(TimeCurvePoint { delta_l: dl, l1, chi, converged: true });
            }
            Err(_) => {
                warm = timeopt::approx_lambda1(dl);
                points.push(TimeCurvePoint {
                    delta_l: dl,
                    l1: f64::NAN,
                    chi: f64::NAN,
                    converged: false,
                });
            }
        }
    }
    let rate =
        points.iter().filter(|p| p.converged).count() as f64 / points.len().max(1) as f64;
    Ok(TimeCurve {
        points,
        meta: AtlasMeta {
            schema_version: SCHEMA_VERSION,
            kind: "time".into(),
            epsilon: 0.0,
            code_version: crate::VERSION.into(),
            rng_seed: 0,
            seed_policy: "warm-start-sweep-v1".into(),
            dl_axis: Vec::new(),
            eta_axis: Vec::new(),
            convergence_rate: rate,
        },
    })
}

/// Generates the propellant-optimal contour grid. Columns (fixed dL) are
/// independent and run in parallel on the current rayon pool; within a
/// column cells are solved with ascending eta, warm-started from the last
/// converged neighbor below. Retry draws use a per-cell RNG stream derived
/// from `rng_seed`, so results do not depend on scheduling.
pub fn generate_fuel_atlas(
    dl_axis: &[f64],
    eta_axis: &[f64],
    epsilon: f64,
    rng_seed: u64,
) -> Result<AtlasGrid> {
    validate_axis("dl_axis", dl_axis)?;
    validate_axis("eta_axis", eta_axis)?;
    if eta_axis[0] <= 0.0 || *eta_axis.last().unwrap() >= 1.0 {
        return Err(Error::Domain("eta axis must lie inside (0, 1)".into()));
    }

    let columns: Vec<Vec<AtlasCell>> = dl_axis
        .par_iter()
        .enumerate()
        .map(|(i, &dl)| fuel_column(i, dl, eta_axis, epsilon, rng_seed))
        .collect();

    let cells: Vec<AtlasCell> = columns.into_iter().flatten().collect();
    let rate = cells.iter().filter(|c| c.converged).count() as f64 / cells.len() as f64;
    Ok(AtlasGrid {
        dl_axis: dl_axis.to_vec(),
        eta_axis: eta_axis.to_vec(),
        cells,
        meta: AtlasMeta {
            schema_version: SCHEMA_VERSION,
            kind: "fuel".into(),
            epsilon,
            code_version: crate::VERSION.into(),
            rng_seed,
            seed_policy: "column-warm-start+analytic+random-v1".into(),
            dl_axis: dl_axis.to_vec(),
            eta_axis: eta_axis.to_vec(),
            convergence_rate: rate,
        },
    })
}

fn fuel_column(i: usize, dl: f64, eta_axis: &[f64], epsilon: f64, rng_seed: u64) -> Vec<AtlasCell> {
    let Ok(chi_max) = timeopt::chi_max_exact(dl) else {
        return vec![AtlasCell::failed(epsilon); eta_axis.len()];
    };
    let mut out = Vec::with_capacity(eta_axis.len());
    let mut warm: Option<(f64, f64)> = None;
    for (j, &eta) in eta_axis.iter().enumerate() {
        let problem = FuelOptProblem::with_chi_max(dl, eta, 1.0, epsilon, chi_max);
        let mut seeds = Vec::new();
        if let Some((l0, l1)) = warm {
            seeds.push(SeedCandidate { l0, l1, source: SeedSource::WarmStart });
        }
        let opts = SolveOptions {
            seeds,
            rng_seed: cell_seed(rng_seed, i, j),
            ..Default::default()
        };
        match solve_fuel_optimal(&problem, &opts) {
            Ok(sol) => {
                warm = Some((sol.l0, sol.l1));
                out.push(AtlasCell {
                    l0_times_dl: sol.l0 * dl,
                    l1: sol.l1,
                    j_norm: sol.j_norm,
                    n_arcs: sol.n_arcs,
                    converged: true,
                    epsilon,
                });
            }
            Err(_) => {
                warm = None;
                out.push(AtlasCell::failed(epsilon));
            }
        }
    }
    out
}

fn cell_seed(global: u64, i: usize, j: usize) -> u64 {
    let mut h = global
        ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (j as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    // splitmix64 finalizer
    h ^= h >> 30;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^ (h >> 31)
}

fn validate_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Domain(format!("{name} is empty")));
    }
    if axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("{name} must be strictly increasing")));
    }
    if axis[0] <= 0.0 && name == "dl_axis" {
        return Err(Error::Domain("dl_axis must be positive".into()));
    }
    Ok(())
}

/// Warm-start candidates for a query point. Inside a cell whose corners all
/// converged to the same branch (equal burn-arc counts and l1 within the
/// mutation threshold) the corners are blended bilinearly; otherwise the
/// distinct corner values are returned separately, nearest first, so a
/// mutation never produces a blended seed from two branches. Outside the
/// grid hull extrapolation is refused and the analytic estimate is returned
/// instead.
pub fn interpolate_seed(grid: &AtlasGrid, delta_l: f64, eta: f64) -> Result<Vec<SeedCandidate>> {
    let Some(((i, j), (tx, ty))) = locate(grid, delta_l, eta) else {
        let regime = if delta_l <= 2.0 { Regime::Short } else { Regime::Long };
        let est = analytic_fuel_estimate(delta_l, eta, 1.0, regime)?;
        return Ok(vec![SeedCandidate { l0: est.l0, l1: est.l1, source: SeedSource::Analytic }]);
    };

    let corners = [
        (i, j, (1.0 - tx) * (1.0 - ty)),
        (i + 1, j, tx * (1.0 - ty)),
        (i, j + 1, (1.0 - tx) * ty),
        (i + 1, j + 1, tx * ty),
    ];
    let converged: Vec<(usize, usize, f64)> = corners
        .iter()
        .copied()
        .filter(|&(ci, cj, _)| grid.cell(ci, cj).converged)
        .collect();
    if converged.is_empty() {
        let regime = if delta_l <= 2.0 { Regime::Short } else { Regime::Long };
        let est = analytic_fuel_estimate(delta_l, eta, 1.0, regime)?;
        return Ok(vec![SeedCandidate { l0: est.l0, l1: est.l1, source: SeedSource::Analytic }]);
    }

    let same_branch = converged.len() == 4 && {
        let arcs0 = grid.cell(converged[0].0, converged[0].1).n_arcs;
        let l1s: Vec<f64> = converged
            .iter()
            .map(|&(ci, cj, _)| grid.cell(ci, cj).l1)
            .collect();
        let spread = l1s.iter().cloned().fold(f64::MIN, f64::max)
            - l1s.iter().cloned().fold(f64::MAX, f64::min);
        converged
            .iter()
            .all(|&(ci, cj, _)| grid.cell(ci, cj).n_arcs == arcs0)
            && spread <= MUTATION_L1_JUMP
    };

    if same_branch {
        let mut l0dl = 0.0;
        let mut l1 = 0.0;
        for &(ci, cj, w) in &converged {
            let c = grid.cell(ci, cj);
            l0dl += w * c.l0_times_dl;
            l1 += w * c.l1;
        }
        return Ok(vec![SeedCandidate {
            l0: l0dl / delta_l,
            l1,
            source: SeedSource::Interpolated,
        }]);
    }

    // Distinct corner values, nearest first in cell-normalized coordinates.
    let mut cands: Vec<(f64, SeedCandidate)> = Vec::new();
    for &(ci, cj, _) in &converged {
        let c = grid.cell(ci, cj);
        let l0 = c.l0_times_dl / delta_l;
        let dup = cands
            .iter()
            .any(|(_, s)| (s.l1 - c.l1).abs() < 1e-9 && (s.l0 - l0).abs() < 1e-9);
        if dup {
            continue;
        }
        let dx = if ci == i { tx } else { 1.0 - tx };
        let dy = if cj == j { ty } else { 1.0 - ty };
        cands.push((
            dx * dx + dy * dy,
            SeedCandidate { l0, l1: c.l1, source: SeedSource::NearestCell },
        ));
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(cands.into_iter().map(|(_, s)| s).collect())
}

/// Bilinear cost estimate at a query point; `None` outside the hull or next
/// to failed corners.
pub fn interpolate_j_norm(grid: &AtlasGrid, delta_l: f64, eta: f64) -> Option<f64> {
    let ((i, j), (tx, ty)) = locate(grid, delta_l, eta)?;
    let c = [
        (grid.cell(i, j), (1.0 - tx) * (1.0 - ty)),
        (grid.cell(i + 1, j), tx * (1.0 - ty)),
        (grid.cell(i, j + 1), (1.0 - tx) * ty),
        (grid.cell(i + 1, j + 1), tx * ty),
    ];
    if c.iter().any(|(cell, _)| !cell.converged) {
        return None;
    }
    Some(c.iter().map(|(cell, w)| cell.j_norm * w).sum())
}

#[allow(clippy::type_complexity)]
fn locate(grid: &AtlasGrid, dl: f64, eta: f64) -> Option<((usize, usize), (f64, f64))> {
    let i = axis_cell(&grid.dl_axis, dl)?;
    let j = axis_cell(&grid.eta_axis, eta)?;
    let tx = (dl - grid.dl_axis[i]) / (grid.dl_axis[i + 1] - grid.dl_axis[i]);
    let ty = (eta - grid.eta_axis[j]) / (grid.eta_axis[j + 1] - grid.eta_axis[j]);
    Some(((i, j), (tx, ty)))
}

fn axis_cell(axis: &[f64], v: f64) -> Option<usize> {
    if axis.len() < 2 || v < axis[0] || v > *axis.last().unwrap() {
        return None;
    }
    let i = axis.partition_point(|&a| a <= v).saturating_sub(1);
    Some(i.min(axis.len() - 2))
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    s.into()
}

/// Writes the grid as CSV plus a `<path>.meta.json` sidecar; numeric fields
/// carry 17 significant digits so the round trip is lossless.
pub fn write_atlas(grid: &AtlasGrid, path: &Path) -> Result<()> {
    let mut body = String::new();
    body.push_str(FUEL_COLUMNS);
    body.push('\n');
    for (i, &dl) in grid.dl_axis.iter().enumerate() {
        for (j, &eta) in grid.eta_axis.iter().enumerate() {
            let c = grid.cell(i, j);
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{},{}",
                fmt_f64(dl),
                fmt_f64(eta),
                fmt_f64(c.l0_times_dl),
                fmt_f64(c.l1),
                fmt_f64(c.j_norm),
                c.n_arcs,
                c.converged,
                fmt_f64(c.epsilon),
            );
        }
    }
    std::fs::write(path, body)?;
    let meta = serde_json::to_string_pretty(&grid.meta)
        .map_err(|e| Error::AtlasMeta(e.to_string()))?;
    std::fs::write(sidecar_path(path), meta)?;
    Ok(())
}

/// Reads a grid written by [`write_atlas`], validating the column set, the
/// row grid, and the sidecar schema version.
pub fn read_atlas(path: &Path) -> Result<AtlasGrid> {
    let meta: AtlasMeta = serde_json::from_str(
        &std::fs::read_to_string(sidecar_path(path))?,
    )
    .map_err(|e| Error::AtlasMeta(format!("{}: {e}", sidecar_path(path).display())))?;
    if meta.schema_version != SCHEMA_VERSION {
        return Err(Error::AtlasMeta(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            meta.schema_version
        )));
    }

    let text = std::fs::read_to_string(path)?;
    let pdisp = path.display().to_string();
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::AtlasParse {
        path: pdisp.clone(),
        line: 1,
        msg: "empty file".into(),
    })?;
    check_header(header, FUEL_COLUMNS, &pdisp)?;

    let ncols = FUEL_COLUMNS.split(',').count();
    let mut rows: Vec<(f64, f64, AtlasCell)> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ncols {
            return Err(Error::AtlasParse {
                path: pdisp.clone(),
                line: lineno,
                msg: format!("expected {ncols} fields, found {}", fields.len()),
            });
        }
        let num = |k: usize| -> Result<f64> {
            fields[k].trim().parse::<f64>().map_err(|e| Error::AtlasParse {
                path: pdisp.clone(),
                line: lineno,
                msg: format!("field {}: {e}", FUEL_COLUMNS.split(',').nth(k).unwrap()),
            })
        };
        let n_arcs = fields[5].trim().parse::<usize>().map_err(|e| Error::AtlasParse {
            path: pdisp.clone(),
            line: lineno,
            msg: format!("field n_arcs: {e}"),
        })?;
        let converged = match fields[6].trim() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::AtlasParse {
                    path: pdisp.clone(),
                    line: lineno,
                    msg: format!("field converged: expected true/false, found {other}"),
                })
            }
        };
        rows.push((
            num(0)?,
            num(1)?,
            AtlasCell {
                l0_times_dl: num(2)?,
                l1: num(3)?,
                j_norm: num(4)?,
                n_arcs,
                converged,
                epsilon: num(7)?,
            },
        ));
    }

    let mut dl_axis: Vec<f64> = rows.iter().map(|r| r.0).collect();
    dl_axis.sort_by(f64::total_cmp);
    dl_axis.dedup();
    let mut eta_axis: Vec<f64> = rows.iter().map(|r| r.1).collect();
    eta_axis.sort_by(f64::total_cmp);
    eta_axis.dedup();
    if rows.len() != dl_axis.len() * eta_axis.len() {
        return Err(Error::AtlasParse {
            path: pdisp,
            line: 1,
            msg: format!(
                "rows do not form a complete grid: {} rows vs {} x {} axes",
                rows.len(),
                dl_axis.len(),
                eta_axis.len()
            ),
        });
    }
    let mut cells = vec![AtlasCell::failed(meta.epsilon); rows.len()];
    for (dl, eta, cell) in rows {
        let i = dl_axis.partition_point(|&a| a < dl);
        let j = eta_axis.partition_point(|&a| a < eta);
        cells[i * eta_axis.len() + j] = cell;
    }
    Ok(AtlasGrid { dl_axis, eta_axis, cells, meta })
}

/// Writes the time-optimal sweep as CSV with the same sidecar convention.
pub fn write_time_curve(curve: &TimeCurve, path: &Path) -> Result<()> {
    let mut body = String::new();
    body.push_str(TIME_COLUMNS);
    body.push('\n');
    for p in &curve.points {
        let _ = writeln!(
            body,
            "{},{},{},{}",
            fmt_f64(p.delta_l),
            fmt_f64(p.l1),
            fmt_f64(p.chi),
            p.converged
        );
    }
    std::fs::write(path, body)?;
    let meta = serde_json::to_string_pretty(&curve.meta)
        .map_err(|e| Error::AtlasMeta(e.to_string()))?;
    std::fs::write(sidecar_path(path), meta)?;
    Ok(())
}

fn check_header(header: &str, expected: &str, path: &str) -> Result<()> {
    let got: Vec<&str> = header.split(',').map(str::trim).collect();
    let want: Vec<&str> = expected.split(',').collect();
    for g in &got {
        if !want.contains(g) {
            return Err(Error::AtlasParse {
                path: path.into(),
                line: 1,
                msg: format!("unknown column `{g}`"),
            });
        }
    }
    for w in &want {
        if !got.contains(w) {
            return Err(Error::AtlasParse {
                path: path.into(),
                line: 1,
                msg: format!("missing column `{w}`"),
            });
        }
    }
    if got != want {
        return Err(Error::AtlasParse {
            path: path.into(),
            line: 1,
            msg: "columns out of order".into(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_grid() -> AtlasGrid {
        let dl: Vec<f64> = vec![0.5, 1.0, 1.5];
        let eta: Vec<f64> = vec![0.4, 0.5, 0.6];
        generate_fuel_atlas(&dl, &eta, 0.1, 7).unwrap()
    }

    #[test]
    fn time_sweep_single_point() {
        let c = generate_time_atlas((0.44866, 0.44866), 1.0).unwrap();
        assert_eq!(c.points.len(), 1);
        assert!((c.points[0].chi - 0.05).abs() < 2e-4);
    }

    #[test]
    fn time_sweep_is_monotone_and_converges() {
        let c = generate_time_atlas((0.125, 12.5), 0.125).unwrap();
        assert_eq!(c.points.len(), 100);
        assert!(c.points.iter().all(|p| p.converged));
        for w in c.points.windows(2) {
            assert!(w[1].chi > w[0].chi, "chi not increasing at dL = {}", w[1].delta_l);
        }
    }

    #[test]
    fn fuel_grid_converges_and_orders_cells() {
        let g = small_grid();
        assert_eq!(g.cells.len(), 9);
        assert_relative_eq!(g.convergence_rate(), 1.0);
        // Cost falls with eta in every column.
        for i in 0..3 {
            assert!(g.cell(i, 0).j_norm >= g.cell(i, 1).j_norm);
            assert!(g.cell(i, 1).j_norm >= g.cell(i, 2).j_norm);
        }
    }

    #[test]
    fn node_query_echoes_stored_values() {
        let g = small_grid();
        let seeds = interpolate_seed(&g, 1.0, 0.5).unwrap();
        assert_eq!(seeds.len(), 1);
        let c = g.cell(1, 1);
        assert_relative_eq!(seeds[0].l0, c.l0_times_dl / 1.0, max_relative = 1e-12);
        assert_relative_eq!(seeds[0].l1, c.l1, max_relative = 1e-12);
    }

    #[test]
    fn outside_hull_returns_analytic_candidate() {
        let g = small_grid();
        let seeds = interpolate_seed(&g, 30.0, 0.5).unwrap();
        assert_eq!(seeds.len(), 1);
        assert_eq!(seeds[0].source, SeedSource::Analytic);
    }

    #[test]
    fn regeneration_is_deterministic() {
        let a = small_grid();
        let b = small_grid();
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            assert_eq!(ca.l0_times_dl.to_bits(), cb.l0_times_dl.to_bits());
            assert_eq!(ca.l1.to_bits(), cb.l1.to_bits());
            assert_eq!(ca.j_norm.to_bits(), cb.j_norm.to_bits());
        }
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let g = small_grid();
        let dir = std::env::temp_dir().join(format!("rephase-atlas-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("grid.csv");
        write_atlas(&g, &path).unwrap();
        let back = read_atlas(&path).unwrap();
        assert_eq!(g.dl_axis, back.dl_axis);
        assert_eq!(g.eta_axis, back.eta_axis);
        for (a, b) in g.cells.iter().zip(&back.cells) {
            assert_eq!(a.l0_times_dl.to_bits(), b.l0_times_dl.to_bits());
            assert_eq!(a.l1.to_bits(), b.l1.to_bits());
            assert_eq!(a.j_norm.to_bits(), b.j_norm.to_bits());
            assert_eq!(a.n_arcs, b.n_arcs);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn unknown_column_is_named_in_the_error() {
        let dir = std::env::temp_dir().join(format!("rephase-atlas-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        let g = small_grid();
        write_atlas(&g, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let text = text.replace("l0_times_dL", "bogus_column");
        std::fs::write(&path, text).unwrap();
        let err = read_atlas(&path).unwrap_err().to_string();
        assert!(err.contains("bogus_column"), "error was: {err}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(generate_fuel_atlas(&[1.0, 0.5], &[0.4, 0.5], 0.1, 0).is_err());
        assert!(generate_fuel_atlas(&[0.5, 1.0], &[0.4, 1.2], 0.1, 0).is_err());
        assert!(generate_time_atlas((1.0, 0.5), 0.1).is_err());
    }
}
