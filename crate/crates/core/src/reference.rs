//! Fourier pseudospectral reference solver on a periodic rectangle.
//!
//! Spatial operators act as multiplication by `|k|^{2s}` on the discrete
//! Fourier coefficients; time marching uses the same two-level recurrence as
//! the collocation stepper, mode by mode.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::media::{EquationMode, MediumParams};
use crate::stepper::{ForceTerm, InitialField, RunAborted, RunOutput, Snapshot};

/// Periodic tensor grid with nodes `x0 + i lx / nx`, `y0 + j ly / ny`.
///
/// Wavenumbers follow the DFT layout `0, 1, .., n/2, -(n/2 - 1), .., -1`
/// times `2 pi / l`; for even `n` the Nyquist index `n/2` carries the
/// positive wavenumber `pi n / l`. The symbols used here depend on `|k|`
/// only, so that choice does not affect real fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub x0: f64,
    pub y0: f64,
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
}

fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * signed / l
        })
        .collect()
}

impl SpectralGrid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Config(format!("spectral grid needs at least 2x2 nodes, got {nx}x{ny}")));
        }
        if !(lx > 0.0 && ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
            return Err(Error::Config(format!("spectral periods must be positive, got {lx} x {ly}")));
        }
        Ok(Self { nx, ny, lx, ly, x0, y0, kx: wavenumbers(nx, lx), ky: wavenumbers(ny, ly) })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Nodes in row-major order, `x` fastest.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                pts.push(Point::new(self.x0 + i as f64 * self.dx(), self.y0 + j as f64 * self.dy()));
            }
        }
        pts
    }

    /// `|k|` in the same layout as [`SpectralGrid::points`].
    pub fn kmag(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for ky in &self.ky {
            for kx in &self.kx {
                out.push(kx.hypot(*ky));
            }
        }
        out
    }

    /// `|k|^{2 exponent}` with the zero mode set to 0 for positive exponents.
    pub fn symbol(&self, exponent: f64) -> Vec<f64> {
        self.kmag()
            .into_iter()
            .map(|k| if exponent == 0.0 { 1.0 } else if k == 0.0 { 0.0 } else { k.powf(2.0 * exponent) })
            .collect()
    }
}

/// Forward and inverse 2-D transforms for one grid shape.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fx: planner.plan_fft_forward(nx),
            fy: planner.plan_fft_forward(ny),
            ix: planner.plan_fft_inverse(nx),
            iy: planner.plan_fft_inverse(ny),
        }
    }

    fn apply(&self, data: &mut [Complex64], along_x: &dyn Fft<f64>, along_y: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.nx * self.ny);
        along_x.process(data);
        let mut column = vec![Complex64::new(0.0, 0.0); self.ny];
        for i in 0..self.nx {
            for (j, c) in column.iter_mut().enumerate() {
                *c = data[j * self.nx + i];
            }
            along_y.process(&mut column);
            for (j, c) in column.iter().enumerate() {
                data[j * self.nx + i] = *c;
            }
        }
    }

    pub fn forward(&self, field: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply(&mut data, self.fx.as_ref(), self.fy.as_ref());
        data
    }

    /// Normalized inverse; returns the real part.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        self.apply(&mut data, self.ix.as_ref(), self.iy.as_ref());
        let scale = 1.0 / (self.nx * self.ny) as f64;
        data.iter().map(|c| c.re * scale).collect()
    }
}

/// `(-lap)^exponent` of a periodic field given at the grid nodes.
pub fn spectral_frac_laplacian(field: &[f64], exponent: f64, grid: &SpectralGrid) -> Vec<f64> {
    let fft = Fft2::new(grid.nx, grid.ny);
    let mut coeffs = fft.forward(field);
    for (c, s) in coeffs.iter_mut().zip(grid.symbol(exponent)) {
        *c *= s;
    }
    fft.inverse(&coeffs)
}

/// Trigonometric interpolant of the field with coefficients `coeffs` at
/// arbitrary points.
pub fn evaluate_modes(grid: &SpectralGrid, coeffs: &[Complex64], targets: &[Point]) -> Vec<f64> {
    use rayon::prelude::*;
    let scale = 1.0 / grid.len() as f64;
    targets
        .par_iter()
        .map(|p| {
            let ex: Vec<Complex64> = grid.kx.iter().map(|k| Complex64::from_polar(1.0, k * (p.x - grid.x0))).collect();
            let mut total = Complex64::new(0.0, 0.0);
            for (j, ky) in grid.ky.iter().enumerate() {
                let row = &coeffs[j * grid.nx..(j + 1) * grid.nx];
                let inner: Complex64 = row.iter().zip(&ex).map(|(c, e)| c * e).sum();
                total += inner * Complex64::from_polar(1.0, ky * (p.y - grid.y0));
            }
            total.re * scale
        })
        .collect()
}

/// Uniform-medium scenario for the reference solver.
#[derive(Debug, Clone)]
pub struct SpectralScenario {
    pub grid: SpectralGrid,
    pub medium: MediumParams,
    pub c0: f64,
    pub mode: EquationMode,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialField,
    /// `None` or `Field`; separable forces tied to collocation points are
    /// rejected.
    pub force: ForceTerm,
    pub snapshot_times: Vec<f64>,
    pub receivers: Vec<Point>,
    /// Snapshot evaluation points.
    pub targets: Vec<Point>,
    pub monitor_every: usize,
}

/// Per-mode coefficients of the recurrence
/// `u^{n+1} = (a u^n - u^{n-1} + dt^2 c^2 f^n) / b`.
struct ModeUpdate {
    a: Vec<f64>,
    b: Vec<f64>,
    force_scale: f64,
}

fn mode_update(sc: &SpectralScenario) -> ModeUpdate {
    let terms = sc.medium.mode_terms(sc.mode, sc.c0);
    let c2 = terms.c_phase * terms.c_phase;
    let ks = sc.grid.symbol(terms.dispersion_exponent);
    let ka = sc.grid.symbol(terms.attenuation_exponent);
    let dt = sc.dt;
    let mut a = Vec::with_capacity(ks.len());
    let mut b = Vec::with_capacity(ks.len());
    for (s, at) in ks.iter().zip(&ka) {
        let damp = if terms.tau == 0.0 { 0.0 } else { terms.tau * dt * c2 * at };
        a.push(2.0 + terms.eta * dt * dt * c2 * s - damp);
        b.push(1.0 - damp);
    }
    ModeUpdate { a, b, force_scale: dt * dt * c2 }
}

/// Marches the scenario to `t_end` with the same layer convention as the
/// collocation stepper: layer `n` sits at `(n - 1) dt` and `u^2 = u^1`.
pub fn spectral_run(sc: &SpectralScenario) -> std::result::Result<RunOutput, RunAborted> {
    let dt = sc.dt;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("time step must be positive, got {dt}")).into());
    }
    let last = (sc.t_end / dt).round() as usize;
    if last < 1 {
        return Err(Error::Config(format!("t_end {} is shorter than one time step", sc.t_end)).into());
    }
    if let Some(t) = sc.snapshot_times.iter().find(|&&t| t < 0.0 || t > sc.t_end * (1.0 + 1e-12)) {
        return Err(Error::Config(format!("snapshot time {t} outside [0, {}]", sc.t_end)).into());
    }
    if matches!(sc.force, ForceTerm::Separable { .. }) {
        return Err(Error::Config("the spectral solver takes a force field, not collocation samples".into()).into());
    }
    let nodes = sc.grid.points();
    let fft = Fft2::new(sc.grid.nx, sc.grid.ny);
    let upd = mode_update(sc);
    let sigma0: Vec<f64> = nodes.iter().map(|&p| sc.initial.value(p)).collect();
    let mut prev = fft.forward(&sigma0);
    let mut curr = prev.clone();
    let snap_layers: Vec<usize> = sc.snapshot_times.iter().map(|t| (t / dt).round() as usize + 1).collect();

    let mut out = RunOutput::default();
    let record = |out: &mut RunOutput, coeffs: &[Complex64], n: usize| {
        let t = (n - 1) as f64 * dt;
        if !sc.receivers.is_empty() {
            out.trace_times.push(t);
            out.traces.push(evaluate_modes(&sc.grid, coeffs, &sc.receivers));
        }
        if sc.monitor_every > 0 && (n - 1) % sc.monitor_every == 0 {
            let nodal = fft.inverse(coeffs);
            out.peak_history.push((t, nodal.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
        }
        for _ in snap_layers.iter().filter(|&&l| l == n) {
            out.snapshots.push(snapshot(sc, &fft, coeffs, t));
        }
    };
    record(&mut out, &prev, 1);
    record(&mut out, &curr, 2);
    let mut n = 2;
    while n < last + 1 {
        let t = (n - 1) as f64 * dt;
        let force = match &sc.force {
            ForceTerm::Field(f) => Some(fft.forward(&nodes.iter().map(|&p| f(p, t)).collect::<Vec<_>>())),
            _ => None,
        };
        let mut worst = 0.0f64;
        for k in 0..curr.len() {
            let mut next = upd.a[k] * curr[k] - prev[k];
            if let Some(f) = &force {
                next += upd.force_scale * f[k];
            }
            next /= upd.b[k];
            prev[k] = curr[k];
            curr[k] = next;
            worst = worst.max(next.norm());
        }
        n += 1;
        if !worst.is_finite() {
            out.snapshots.push(snapshot(sc, &fft, &prev, t));
            return Err(RunAborted { error: Error::Instability { step: n, max_magnitude: worst }, partial: out });
        }
        record(&mut out, &curr, n);
    }
    Ok(out)
}

fn snapshot(sc: &SpectralScenario, fft: &Fft2, coeffs: &[Complex64], t: f64) -> Snapshot {
    let values = evaluate_modes(&sc.grid, coeffs, &sc.targets);
    let nodal = fft.inverse(coeffs);
    let peak = values.iter().chain(&nodal).fold(0.0f64, |m, v| m.max(v.abs()));
    // No boundary collocation points on a periodic grid.
    Snapshot { time: t, values, peak, boundary_max: 0.0 }
}
