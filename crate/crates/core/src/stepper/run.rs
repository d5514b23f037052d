//! Scenario orchestration: initial field, marching, snapshots and traces.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use super::{assemble, initialize, step, AssemblyOptions, StepperState, SystemMatrices};
use crate::error::Error;
use crate::geometry::{regular_grid, Domain2D, Point, PointCloud};
use crate::media::{MediumParams, VelocityField};
use crate::rbf::{self, Multiquadric};

/// `[1 - 2 (pi f0 r)^2] exp(-(pi f0 r)^2)` with `r` the distance to `(xs, ys)`.
pub fn ricker(f0: f64, xs: f64, ys: f64, p: Point) -> f64 {
    let a = (PI * f0).powi(2) * ((p.x - xs).powi(2) + (p.y - ys).powi(2));
    (1.0 - 2.0 * a) * (-a).exp()
}

/// Field at `t = 0`.
#[derive(Clone)]
pub enum InitialField {
    Zero,
    Ricker { f0: f64, x: f64, y: f64 },
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl InitialField {
    pub fn value(&self, p: Point) -> f64 {
        match self {
            InitialField::Zero => 0.0,
            InitialField::Ricker { f0, x, y } => ricker(*f0, *x, *y, p),
            InitialField::Custom(f) => f(p),
        }
    }
}

impl fmt::Debug for InitialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialField::Zero => write!(f, "Zero"),
            InitialField::Ricker { f0, x, y } => write!(f, "Ricker {{ f0: {f0}, x: {x}, y: {y} }}"),
            InitialField::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// External force `f(x, y, t)` sampled at interior collocation points.
#[derive(Clone, Default)]
pub enum ForceTerm {
    #[default]
    None,
    /// `temporal(t) * spatial[i]`, with `spatial` given at the interior points.
    Separable { spatial: Vec<f64>, temporal: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
    Field(Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>),
}

impl ForceTerm {
    fn sample(&self, interior: &[Point], t: f64) -> Option<Vec<f64>> {
        match self {
            ForceTerm::None => None,
            ForceTerm::Separable { spatial, temporal } => {
                let s = temporal(t);
                Some(spatial.iter().map(|g| s * g).collect())
            }
            ForceTerm::Field(f) => Some(interior.iter().map(|&p| f(p, t)).collect()),
        }
    }
}

impl fmt::Debug for ForceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForceTerm::None => write!(f, "None"),
            ForceTerm::Separable { spatial, .. } => write!(f, "Separable({} points)", spatial.len()),
            ForceTerm::Field(_) => write!(f, "Field"),
        }
    }
}

/// Regular evaluation grid over the domain bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotGrid {
    pub nx: usize,
    pub ny: usize,
    pub points: Vec<Point>,
    /// Nodes inside the closed domain; the rest are reported as zero.
    pub inside: Vec<bool>,
}

impl SnapshotGrid {
    pub fn new(domain: &Domain2D, nx: usize, ny: usize) -> Self {
        let points = regular_grid(domain, nx, ny);
        let inside = points.iter().map(|p| domain.contains_closed(*p)).collect();
        Self { nx, ny, points, inside }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: Domain2D,
    pub cloud: PointCloud,
    pub basis: Multiquadric,
    pub medium: MediumParams,
    pub velocity: VelocityField,
    pub assembly: AssemblyOptions,
    pub initial: InitialField,
    pub force: ForceTerm,
    /// Final time, rounded to a whole number of steps.
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub receivers: Vec<Point>,
    pub grid: SnapshotGrid,
    /// Record the peak collocation value every this many layers (0 = off).
    pub monitor_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    /// Values on `grid.points`.
    pub values: Vec<f64>,
    /// Largest `|sigma|` over the snapshot grid and the collocation points.
    pub peak: f64,
    /// Largest `|sigma|` over the boundary collocation points.
    pub boundary_max: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub trace_times: Vec<f64>,
    /// One row per time layer, one column per receiver.
    pub traces: Vec<Vec<f64>>,
    /// `(time, max |sigma| over collocation points)`.
    pub peak_history: Vec<(f64, f64)>,
    /// Final coefficient vector.
    pub lambda: Vec<f64>,
    pub operator_seconds: f64,
    pub factor_seconds: f64,
    /// Wall time of the time loop and the number of steps it took.
    pub march_seconds: f64,
    pub steps: usize,
}

/// Run stopped early; `partial` holds what was produced, including a
/// snapshot of the last finite layer.
#[derive(Debug)]
pub struct RunAborted {
    pub error: Error,
    pub partial: RunOutput,
}

impl From<Error> for RunAborted {
    fn from(error: Error) -> Self {
        Self { error, partial: RunOutput::default() }
    }
}

fn snapshot_layers(times: &[f64], dt: f64) -> Vec<usize> {
    times.iter().map(|t| (t / dt).round() as usize + 1).collect()
}

struct Recorder<'a> {
    sc: &'a Scenario,
    sys: &'a SystemMatrices,
    sources: Vec<Point>,
    out: RunOutput,
}

impl Recorder<'_> {
    fn record(&mut self, state_lambda: &DVector<f64>, n: usize, snap_layers: &[usize]) {
        let t = (n - 1) as f64 * self.sc.assembly.dt;
        let lam = state_lambda.as_slice();
        if !self.sc.receivers.is_empty() {
            self.out.trace_times.push(t);
            self.out.traces.push(rbf::evaluate(&self.sc.basis, &self.sources, lam, &self.sc.receivers));
        }
        if self.sc.monitor_every > 0 && (n - 1) % self.sc.monitor_every == 0 {
            let (interior, boundary) = self.sys.collocation_values(state_lambda);
            self.out.peak_history.push((t, interior.amax().max(boundary.amax())));
        }
        for _ in snap_layers.iter().filter(|&&l| l == n) {
            self.snapshot(state_lambda, t);
        }
    }

    fn snapshot(&mut self, lambda: &DVector<f64>, t: f64) {
        let grid = &self.sc.grid;
        let mut values = rbf::evaluate(&self.sc.basis, &self.sources, lambda.as_slice(), &grid.points);
        for (v, &inside) in values.iter_mut().zip(&grid.inside) {
            if !inside {
                *v = 0.0;
            }
        }
        let (interior, boundary) = self.sys.collocation_values(lambda);
        let peak = values.iter().fold(interior.amax().max(boundary.amax()), |m, v| m.max(v.abs()));
        self.out.snapshots.push(Snapshot { time: t, values, peak, boundary_max: boundary.amax() });
    }
}

/// Assembles, initializes and marches the scenario to `t_end`.
pub fn run(sc: &Scenario) -> std::result::Result<RunOutput, RunAborted> {
    let dt = sc.assembly.dt;
    let last = (sc.t_end / dt).round() as usize;
    if last < 1 {
        return Err(Error::Config(format!("t_end {} is shorter than one time step", sc.t_end)).into());
    }
    if let Some(t) = sc.snapshot_times.iter().find(|&&t| t < 0.0 || t > sc.t_end * (1.0 + 1e-12)) {
        return Err(Error::Config(format!("snapshot time {t} outside [0, {}]", sc.t_end)).into());
    }
    let sys = assemble(&sc.basis, &sc.cloud, &sc.domain, &sc.medium, &sc.velocity, &sc.assembly)?;
    let sigma0: Vec<f64> = sc.cloud.points().iter().map(|&p| sc.initial.value(p)).collect();
    let mut state: StepperState = initialize(&sys, &sc.cloud, &sigma0, sc.assembly.diagonal_shift)?;

    let snap_layers = snapshot_layers(&sc.snapshot_times, dt);
    let mut rec = Recorder { sc, sys: &sys, sources: sc.cloud.points(), out: RunOutput::default() };
    rec.out.operator_seconds = sys.operator_time.as_secs_f64();
    rec.out.factor_seconds = sys.factor_time.as_secs_f64();
    // Layer n sits at (n - 1) dt, so the final layer is last + 1.
    rec.record(&state.lambda_prev, 1, &snap_layers);
    rec.record(&state.lambda_curr, 2, &snap_layers);
    let started = std::time::Instant::now();
    while state.n < last + 1 {
        let force = sc.force.sample(&sc.cloud.interior, state.time());
        if let Err(error) = step(&sys, &mut state, force.as_deref()) {
            let lam = state.lambda_curr.clone();
            rec.snapshot(&lam, state.time());
            rec.out.lambda = lam.as_slice().to_vec();
            return Err(RunAborted { error, partial: rec.out });
        }
        rec.record(&state.lambda_curr, state.n, &snap_layers);
        rec.out.steps += 1;
    }
    rec.out.march_seconds = started.elapsed().as_secs_f64();
    rec.out.lambda = state.lambda_curr.as_slice().to_vec();
    Ok(rec.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraclap::FracOpConfig;
    use crate::geometry::generate_cloud;
    use crate::media::EquationMode;

    fn scenario(initial: InitialField, t_end: f64, dt: f64) -> Scenario {
        let domain = Domain2D::rectangle(0.0, 200.0, 0.0, 200.0).unwrap();
        let cloud = generate_cloud(&domain, 25.0).unwrap();
        let grid = SnapshotGrid::new(&domain, 9, 9);
        Scenario {
            basis: Multiquadric::new(25.0).unwrap(),
            medium: MediumParams::new(100.0, 60.0, 1.0).unwrap(),
            velocity: VelocityField::Constant(2000.0),
            assembly: AssemblyOptions { op: FracOpConfig::new(2.0, 20), mode: EquationMode::Full, dt, diagonal_shift: 0.0 },
            initial,
            force: ForceTerm::None,
            t_end,
            snapshot_times: vec![0.0, t_end],
            receivers: vec![Point::new(100.0, 100.0), Point::new(50.0, 100.0)],
            grid,
            monitor_every: 1,
            domain,
            cloud,
        }
    }

    #[test]
    fn ricker_profile() {
        assert_eq!(ricker(5.0, 1.0, 2.0, Point::new(1.0, 2.0)), 1.0);
        let a: f64 = (PI * 0.01 * 10.0).powi(2);
        assert!((ricker(0.01, 0.0, 0.0, Point::new(6.0, 8.0)) - (1.0 - 2.0 * a) * (-a).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_source_gives_zero_snapshots() {
        let out = run(&scenario(InitialField::Zero, 5e-3, 1e-3)).unwrap();
        assert_eq!(out.snapshots.len(), 2);
        assert!(out.snapshots.iter().all(|s| s.values.iter().all(|&v| v == 0.0)));
        assert_eq!(out.traces.len(), 6);
    }

    #[test]
    fn single_layer_run_has_two_initial_layers() {
        let out = run(&scenario(InitialField::Ricker { f0: 0.01, x: 100.0, y: 100.0 }, 1e-3, 1e-3)).unwrap();
        assert_eq!(out.trace_times, vec![0.0, 1e-3]);
        assert_eq!(out.traces[0], out.traces[1]);
    }

    #[test]
    fn boundary_stays_zero_and_runs_are_deterministic() {
        let sc = scenario(InitialField::Ricker { f0: 0.01, x: 100.0, y: 100.0 }, 0.02, 1e-3);
        let a = run(&sc).unwrap();
        for s in &a.snapshots {
            assert!(s.boundary_max <= 1e-6 * s.peak, "{} vs {}", s.boundary_max, s.peak);
        }
        let b = run(&sc).unwrap();
        assert_eq!(a.traces, b.traces);
        assert_eq!(a.lambda, b.lambda);
    }

    #[test]
    fn snapshot_outside_run_is_rejected() {
        let mut sc = scenario(InitialField::Zero, 2e-3, 1e-3);
        sc.snapshot_times.push(1.0);
        assert!(matches!(run(&sc), Err(RunAborted { error: Error::Config(_), .. })));
    }
}
