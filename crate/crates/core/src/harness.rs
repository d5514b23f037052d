//! Manufactured-solution validation and convergence studies.
//!
//! The exact field is `sigma_e = exp(-t) s(x, y)` on `(0, 1000)^2` with
//! `s = x^3 (1000 - x)^3 y^3.6 (1000 - y)^3.6`. Since `d/dt exp(-t) = -exp(-t)`
//! the force is `f = exp(-t) g` with
//!
//! ```text
//! g = s / c^2 - eta (-lap)^{gamma+1} s + tau (-lap)^{gamma+1/2} s
//! ```
//!
//! and `g` is computed once per point set.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fraclap::{frac_laplacian_fn, FracOpConfig};
use crate::geometry::{generate_cloud, Domain2D, Point};
use crate::media::{EquationMode, MediumParams, VelocityField};
use crate::rbf::Multiquadric;
use crate::stepper::{run, AssemblyOptions, ForceTerm, InitialField, Scenario, SnapshotGrid};

pub const SIDE: f64 = 1000.0;

/// Spatial factor of the exact solution; zero on the square's edges.
pub fn spatial_factor(p: Point) -> f64 {
    let (x, y) = (p.x, p.y);
    if !(0.0..=SIDE).contains(&x) || !(0.0..=SIDE).contains(&y) {
        return 0.0;
    }
    (x * (SIDE - x)).powi(3) * (y * (SIDE - y)).powf(3.6)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase {
    /// Reference velocity in m/s.
    pub c0: f64,
    pub q_factor: f64,
    pub omega0: f64,
    /// Solver operator settings.
    pub op: FracOpConfig,
    /// Operator settings for the force term.
    pub force_op: FracOpConfig,
    pub dt: f64,
    pub t_end: f64,
}

impl Default for ManufacturedCase {
    fn default() -> Self {
        let op = FracOpConfig::default();
        Self { c0: 3000.0, q_factor: 10.0, omega0: 60.0, op, force_op: refined(&op), dt: 1e-7, t_end: 1e-5 }
    }
}

/// Halved step and doubled direction count.
pub fn refined(op: &FracOpConfig) -> FracOpConfig {
    FracOpConfig { h: op.h / 2.0, n_theta: op.n_theta * 2, shift: op.shift }
}

impl ManufacturedCase {
    pub fn domain() -> Domain2D {
        Domain2D::Rectangle { x_min: 0.0, x_max: SIDE, y_min: 0.0, y_max: SIDE }
    }

    pub fn medium(&self) -> Result<MediumParams> {
        MediumParams::new(self.q_factor, self.omega0, 1.0)
    }

    pub fn exact(&self, p: Point, t: f64) -> f64 {
        (-t).exp() * spatial_factor(p)
    }

    /// Time-independent part `g` of the force at one point.
    pub fn force_spatial(&self, p: Point) -> Result<f64> {
        let terms = self.medium()?.mode_terms(EquationMode::Full, self.c0);
        let domain = Self::domain();
        let s = spatial_factor(p);
        let disp = frac_laplacian_fn(spatial_factor, &domain, p, terms.dispersion_exponent, &self.force_op)?;
        let atten = frac_laplacian_fn(spatial_factor, &domain, p, terms.attenuation_exponent, &self.force_op)?;
        Ok(s / (terms.c_phase * terms.c_phase) - terms.eta * disp + terms.tau * atten)
    }

    pub fn force_term(&self, p: Point, t: f64) -> Result<f64> {
        Ok((-t).exp() * self.force_spatial(p)?)
    }

    /// As [`ManufacturedCase::try_solve`], recording numerical failures in
    /// the row instead of returning them.
    pub fn solve(&self, side: usize) -> Result<StudyRow> {
        match self.try_solve(side) {
            Err(e @ (Error::Instability { .. } | Error::Conditioning { .. })) => {
                Ok(StudyRow { points: side * side, failure: Some(e.to_string()), ..StudyRow::default() })
            }
            other => other,
        }
    }

    /// Solves on the `side x side` lattice cloud and compares with the exact
    /// field on [`test_lattice`] at `t_end`.
    pub fn try_solve(&self, side: usize) -> Result<StudyRow> {
        if side < 3 {
            return Err(Error::Config(format!("cloud side must be at least 3, got {side}")));
        }
        let domain = Self::domain();
        let dx = SIDE / (side - 1) as f64;
        let cloud = generate_cloud(&domain, dx)?;
        let spatial = cloud.interior.par_iter().map(|&p| self.force_spatial(p)).collect::<Result<Vec<_>>>()?;
        let lattice = test_lattice();
        let grid = SnapshotGrid { nx: 10, ny: 10, inside: vec![true; lattice.len()], points: lattice.clone() };
        let points = cloud.len();
        let sc = Scenario {
            basis: Multiquadric::new(dx)?,
            medium: self.medium()?,
            velocity: VelocityField::Constant(self.c0),
            assembly: AssemblyOptions { op: self.op, mode: EquationMode::Full, dt: self.dt, diagonal_shift: 0.0 },
            initial: InitialField::Custom(Arc::new(spatial_factor)),
            force: ForceTerm::Separable { spatial, temporal: Arc::new(|t: f64| (-t).exp()) },
            t_end: self.t_end,
            snapshot_times: vec![self.t_end],
            receivers: vec![],
            grid,
            monitor_every: 0,
            domain,
            cloud,
        };
        let out = run(&sc).map_err(|aborted| aborted.error)?;
        let snap = &out.snapshots[0];
        let exact: Vec<f64> = lattice.iter().map(|&p| self.exact(p, snap.time)).collect();
        let (max_abs, avg_rel) = error_norms(&snap.values, &exact)?;
        let per_step = if out.steps > 0 { out.march_seconds / out.steps as f64 } else { 0.0 };
        Ok(StudyRow {
            points,
            max_abs,
            avg_rel,
            assembly_seconds: out.operator_seconds,
            solve_seconds: out.factor_seconds + per_step,
            failure: None,
        })
    }
}

/// Interior `10 x 10` lattice at `1000 k / 11`, `k = 1..=10`, `x` fastest.
pub fn test_lattice() -> Vec<Point> {
    let c: Vec<f64> = (1..=10).map(|k| SIDE * k as f64 / 11.0).collect();
    c.iter().flat_map(|&y| c.iter().map(move |&x| Point::new(x, y))).collect()
}

/// `(|a - e|_inf, |a - e|_2 / |e|_2)`; the relative norm is `None` when
/// `exact` is identically zero.
pub fn error_norms(approx: &[f64], exact: &[f64]) -> Result<(f64, Option<f64>)> {
    if approx.len() != exact.len() {
        return Err(Error::Config(format!("error norms of vectors with lengths {} and {}", approx.len(), exact.len())));
    }
    let max_abs = approx.iter().zip(exact).fold(0.0f64, |m, (a, e)| m.max((a - e).abs()));
    let diff: f64 = approx.iter().zip(exact).map(|(a, e)| (a - e) * (a - e)).sum::<f64>().sqrt();
    let norm: f64 = exact.iter().map(|e| e * e).sum::<f64>().sqrt();
    Ok((max_abs, (norm > 0.0).then(|| diff / norm)))
}

/// One study entry; `failure` holds the error message of an aborted run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudyRow {
    /// Total collocation points `M + N`.
    pub points: usize,
    pub max_abs: f64,
    pub avg_rel: Option<f64>,
    /// Fractional operator assembly.
    pub assembly_seconds: f64,
    /// Factorization plus one time step.
    pub solve_seconds: f64,
    pub failure: Option<String>,
}

/// Side length of a square lattice with `count` points.
pub fn lattice_side(count: usize) -> Result<usize> {
    let side = (count as f64).sqrt().round() as usize;
    if side * side != count || side < 3 {
        return Err(Error::Config(format!("point count {count} is not a square lattice of side >= 3")));
    }
    Ok(side)
}

/// Runs the case once per point count, sequentially.
pub fn convergence_study(case: &ManufacturedCase, point_counts: &[usize]) -> Result<Vec<StudyRow>> {
    if point_counts.is_empty() {
        return Err(Error::Config("empty point count list".into()));
    }
    if point_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("point counts must increase: {point_counts:?}")));
    }
    let sides = point_counts.iter().map(|&c| lattice_side(c)).collect::<Result<Vec<_>>>()?;
    sides.into_iter().map(|s| case.solve(s)).collect()
}

pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut s = String::from("points,max_abs,avg_rel,assembly_seconds,solve_seconds,status\n");
    for r in rows {
        let rel = r.avg_rel.map_or_else(String::new, |v| format!("{v:e}"));
        let status = if r.failure.is_some() { "failed" } else { "ok" };
        let _ = writeln!(s, "{},{:e},{},{:e},{:e},{}", r.points, r.max_abs, rel, r.assembly_seconds, r.solve_seconds, status);
    }
    s
}

pub fn study_report(case: &ManufacturedCase, rows: &[StudyRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "manufactured solution exp(-t) x^3 (1000-x)^3 y^3.6 (1000-y)^3.6");
    let _ = writeln!(s, "c0 = {} m/s, Q = {}, omega0 = {} rad/s", case.c0, case.q_factor, case.omega0);
    let _ = writeln!(s, "dt = {:e} s, t = {:e} s", case.dt, case.t_end);
    let _ = writeln!(s, "solver operator: h = {} m, n_theta = {}", case.op.h, case.op.n_theta);
    let _ = writeln!(s, "force operator: h = {} m, n_theta = {}", case.force_op.h, case.force_op.n_theta);
    let _ = writeln!(s);
    let _ = writeln!(s, "{:>8} {:>12} {:>12} {:>12} {:>12}", "points", "max_abs", "avg_rel", "assembly_s", "solve_s");
    for r in rows {
        match &r.failure {
            Some(msg) => {
                let _ = writeln!(s, "{:>8} failed: {msg}", r.points);
            }
            None => {
                let rel = r.avg_rel.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"));
                let _ = writeln!(
                    s,
                    "{:>8} {:>12.4e} {:>12} {:>12.3} {:>12.3}",
                    r.points, r.max_abs, rel, r.assembly_seconds, r.solve_seconds
                );
            }
        }
    }
    s
}

/// `(x, value)` along the snapshot-grid row nearest to `y`.
pub fn grid_row(grid: &SnapshotGrid, values: &[f64], y: f64) -> Vec<(f64, f64)> {
    let row = (0..grid.ny)
        .min_by(|&a, &b| {
            let da = (grid.points[a * grid.nx].y - y).abs();
            let db = (grid.points[b * grid.nx].y - y).abs();
            da.total_cmp(&db)
        })
        .unwrap_or(0);
    (0..grid.nx).map(|i| (grid.points[row * grid.nx + i].x, values[row * grid.nx + i])).collect()
}

/// Distance from `x_source` to the outermost amplitude extremum on the
/// profile beyond it: the outermost sample with `|v| >= threshold * max |v|`,
/// moved inward to the top of its lobe.
pub fn front_radius(profile: &[(f64, f64)], x_source: f64, threshold: f64) -> Option<f64> {
    let ahead: Vec<(f64, f64)> = profile.iter().copied().filter(|(x, _)| *x > x_source).collect();
    let peak = ahead.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if peak == 0.0 {
        return None;
    }
    let mut i = ahead.iter().rposition(|(_, v)| v.abs() >= threshold * peak)?;
    while i > 0 && ahead[i - 1].1.abs() > ahead[i].1.abs() {
        i -= 1;
    }
    Some(ahead[i].0 - x_source)
}
