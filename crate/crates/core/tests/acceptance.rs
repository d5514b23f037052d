//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line (visible with `--nocapture`) before asserting.
//!
//! The tests share a lock so wall-clock measurements are not disturbed by
//! concurrently running criteria.

use std::sync::{Mutex, MutexGuard};

use fracwave::fraclap::{frac_laplacian_matrix, gamma, gl_directional_fn, gl_weights, FracOpConfig};
use fracwave::geometry::{generate_cloud, Domain2D, Point, Polygon};
use fracwave::harness::{convergence_study, error_norms, front_radius, grid_row, ManufacturedCase};
use fracwave::media::{EquationMode, MediumParams, VelocityField};
use fracwave::rbf::{interpolate, Multiquadric};
use fracwave::reference::{spectral_run, SpectralGrid, SpectralScenario};
use fracwave::stepper::{run, AssemblyOptions, ForceTerm, InitialField, RunOutput, Scenario, SnapshotGrid};

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
}

const C0: f64 = 2000.0;
const SOURCE: Point = Point { x: 500.0, y: 500.0 };

fn square() -> Domain2D {
    Domain2D::rectangle(0.0, 1000.0, 0.0, 1000.0).unwrap()
}

struct Desk {
    domain: Domain2D,
    side: usize,
    q: f64,
    mode: EquationMode,
    f0: f64,
    source: Point,
    dt: f64,
    t_end: f64,
    snapshots: Vec<f64>,
    receivers: Vec<Point>,
    monitor_every: usize,
    grid: usize,
}

impl Desk {
    fn new(q: f64) -> Self {
        Desk {
            domain: square(),
            side: 31,
            q,
            mode: EquationMode::Full,
            f0: 0.004,
            source: SOURCE,
            dt: 1e-3,
            t_end: 0.1,
            snapshots: vec![],
            receivers: vec![],
            monitor_every: 0,
            grid: 61,
        }
    }

    fn dx(&self) -> f64 {
        let (x0, x1, _, _) = self.domain.bounds();
        (x1 - x0) / (self.side - 1) as f64
    }

    fn scenario(&self) -> Scenario {
        let dx = self.dx();
        Scenario {
            cloud: generate_cloud(&self.domain, dx).unwrap(),
            basis: Multiquadric::new(dx).unwrap(),
            medium: MediumParams::new(self.q, 60.0, 1.0).unwrap(),
            velocity: VelocityField::Constant(C0),
            assembly: AssemblyOptions { op: FracOpConfig::default(), mode: self.mode, dt: self.dt, diagonal_shift: 0.0 },
            initial: InitialField::Ricker { f0: self.f0, x: self.source.x, y: self.source.y },
            force: ForceTerm::None,
            t_end: self.t_end,
            snapshot_times: self.snapshots.clone(),
            receivers: self.receivers.clone(),
            grid: SnapshotGrid::new(&self.domain, self.grid, self.grid),
            monitor_every: self.monitor_every,
            domain: self.domain.clone(),
        }
    }

    fn spectral(&self, n: usize) -> SpectralScenario {
        let (x0, x1, y0, y1) = self.domain.bounds();
        SpectralScenario {
            grid: SpectralGrid::new(n, n, x1 - x0, y1 - y0, x0, y0).unwrap(),
            medium: MediumParams::new(self.q, 60.0, 1.0).unwrap(),
            c0: C0,
            mode: self.mode,
            dt: self.dt,
            t_end: self.t_end,
            initial: InitialField::Ricker { f0: self.f0, x: self.source.x, y: self.source.y },
            force: ForceTerm::None,
            snapshot_times: self.snapshots.clone(),
            receivers: self.receivers.clone(),
            targets: SnapshotGrid::new(&self.domain, self.grid, self.grid).points,
            monitor_every: self.monitor_every,
        }
    }
}

/// Largest boundary-to-peak ratio over all snapshots.
fn worst_boundary_ratio(out: &RunOutput) -> f64 {
    out.snapshots.iter().map(|s| if s.peak > 0.0 { s.boundary_max / s.peak } else { 0.0 }).fold(0.0, f64::max)
}

/// Peak history check: all finite and bounded by `factor` times the first
/// entry.
fn bounded(out: &RunOutput, factor: f64) -> (bool, f64, f64) {
    let initial = out.peak_history[0].1;
    let max = out.peak_history.iter().map(|p| p.1).fold(0.0, f64::max);
    let finite = out.peak_history.iter().all(|p| p.1.is_finite());
    (finite && max <= factor * initial, initial, max)
}

#[test]
fn criterion_01_gl_first_order() {
    let _g = serial();
    let exact = 2.0 / gamma(1.5);
    let u = |p: Point| if p.x > 0.0 { p.x * p.x } else { 0.0 };
    let eval = Point::new(1.0, 0.0);
    let errors: Vec<f64> = (0..5)
        .map(|level| {
            let h = 0.05 / f64::from(1 << level);
            let w = gl_weights(1.5, (1.0 / h).round() as usize + 1);
            (gl_directional_fn(u, eval, 0.0, &w, h, 1.0) - exact).abs()
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let pass = orders.iter().all(|o| (0.8..=1.2).contains(o));
    report(1, "GL first order", pass, format!("observed orders {orders:.3?}"));
    assert!(pass);
}

#[test]
fn criterion_02_classical_reduction() {
    let _g = serial();
    let d = square();
    let dx = 25.0;
    let cloud = generate_cloud(&d, dx).unwrap();
    assert_eq!(cloud.len(), 41 * 41);
    let b = Multiquadric::new(dx).unwrap();
    let s = 150.0;
    let g = |p: Point| (-((p.x - 500.0).powi(2) + (p.y - 500.0).powi(2)) / (s * s)).exp();
    let neg_lap = |p: Point| {
        let r2 = (p.x - 500.0).powi(2) + (p.y - 500.0).powi(2);
        (4.0 / (s * s) - 4.0 * r2 / s.powi(4)) * g(p)
    };
    let values: Vec<f64> = cloud.points().iter().map(|&p| g(p)).collect();
    let lambda = interpolate(&b, &cloud, &values, 0.0).unwrap();
    let op = frac_laplacian_matrix(&b, &cloud, &d, 1.0, &FracOpConfig::new(dx / 4.0, 20)).unwrap();
    let got = &op * nalgebra::DVector::from_vec(lambda);
    let exact: Vec<f64> = cloud.interior.iter().map(|&p| neg_lap(p)).collect();
    let (_, rel) = error_norms(got.as_slice(), &exact).unwrap();
    let rel = rel.unwrap();
    let pass = rel <= 0.05;
    report(2, "classical reduction", pass, format!("relative L2 {rel:.4e} (bound 5e-2)"));
    assert!(pass);
}

#[test]
fn criterion_03_04_manufactured_trend_and_assembly_scaling() {
    let _g = serial();
    let rows = convergence_study(&ManufacturedCase::default(), &[121, 441, 961]).unwrap();
    assert!(rows.iter().all(|r| r.failure.is_none()), "{rows:?}");
    let errs: Vec<f64> = rows.iter().map(|r| r.avg_rel.unwrap()).collect();
    let inversions = errs.windows(2).filter(|w| w[1] > w[0]).count();
    let trend = inversions <= 1 && errs[2] <= 0.5 * errs[0];
    report(3, "manufactured trend", trend, format!("avg rel errors {}, inversions {inversions}", sci(&errs)));

    let timing_ok = rows.iter().all(|r| r.assembly_seconds > 0.0 && r.solve_seconds > 0.0);
    let growth = rows[2].points as f64 / rows[1].points as f64;
    let ratio = rows[2].assembly_seconds / rows[1].assembly_seconds;
    let scaling = timing_ok && (2.0..=12.0).contains(&ratio);
    report(4, "assembly scaling", scaling, format!("M+N x{growth:.2} -> assembly time x{ratio:.2} (bounds 2..12)"));
    assert!(trend && scaling);
}

#[test]
fn criterion_05_long_time_stability() {
    let _g = serial();
    let mut desk = Desk::new(100.0);
    // Layers 1 and 2 are the initial data, so 10^4 updates reach layer 10002.
    desk.t_end = 10.001;
    desk.monitor_every = 1;
    let out = run(&desk.scenario()).expect("run completes");
    assert_eq!(out.steps, 10_000);
    let (pass, initial, max) = bounded(&out, 2.0);
    report(5, "long-time stability", pass, format!("10000 steps, initial peak {initial:.4e}, max {max:.4e}"));
    assert!(pass);
}

#[test]
fn criterion_06_attenuation_ordering() {
    let _g = serial();
    let receiver = Point::new(700.0, 500.0);
    let peaks: Vec<f64> = [10.0, 100.0, f64::INFINITY]
        .iter()
        .map(|&q| {
            let mut desk = Desk::new(q);
            desk.t_end = 0.15;
            desk.receivers = vec![receiver];
            let out = run(&desk.scenario()).unwrap();
            // Arrival window after the initial pulse has left the receiver.
            out.trace_times.iter().zip(&out.traces).filter(|(t, _)| **t >= 0.05).fold(0.0f64, |m, (_, v)| m.max(v[0].abs()))
        })
        .collect();
    let pass = peaks[0] < peaks[1] && peaks[1] < peaks[2];
    report(6, "Q ordering", pass, format!("receiver peaks for Q = 10, 100, inf: {}", sci(&peaks)));
    assert!(pass);
}

#[test]
fn criterion_07_phase_agreement() {
    let _g = serial();
    let mut desk = Desk::new(100.0);
    desk.snapshots = vec![0.05, 0.1];
    let a = run(&desk.scenario()).unwrap();
    let b = spectral_run(&desk.spectral(64)).unwrap();
    let grid = SnapshotGrid::new(&desk.domain, desk.grid, desk.grid);
    let cell = 1000.0 / (desk.grid - 1) as f64;
    let mut lags = Vec::new();
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        let ra = front_radius(&grid_row(&grid, &sa.values, 500.0), 500.0, 0.1).unwrap();
        let rb = front_radius(&grid_row(&grid, &sb.values, 500.0), 500.0, 0.1).unwrap();
        lags.push((ra - rb).abs() / cell);
    }
    let pass = lags.iter().all(|&l| l <= 2.0);
    report(7, "phase agreement", pass, format!("front lag in grid cells ({cell:.2} m) {lags:?}"));
    assert!(pass);
}

#[test]
fn criterion_08_zero_boundary() {
    let _g = serial();
    let mut desk = Desk::new(100.0);
    desk.t_end = 1.0;
    desk.snapshots = (0..=20).map(|k| 0.05 * f64::from(k)).collect();
    let out = run(&desk.scenario()).unwrap();
    let ratio = worst_boundary_ratio(&out);
    let pass = ratio <= 1e-6 && out.snapshots.len() == 21;
    report(8, "zero boundary", pass, format!("worst boundary/peak over 21 snapshots {ratio:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_09_classical_limit_matches_reference() {
    let _g = serial();
    let mut desk = Desk::new(f64::INFINITY);
    desk.mode = EquationMode::Classical;
    desk.f0 = 0.003;
    desk.t_end = 0.05;
    desk.snapshots = vec![0.05];
    let a = run(&desk.scenario()).unwrap();
    let b = spectral_run(&desk.spectral(64)).unwrap();
    let grid = SnapshotGrid::new(&desk.domain, desk.grid, desk.grid);
    let interior: Vec<usize> = (0..grid.points.len()).filter(|&i| desk.domain.contains(grid.points[i])).collect();
    let ua: Vec<f64> = interior.iter().map(|&i| a.snapshots[0].values[i]).collect();
    let ub: Vec<f64> = interior.iter().map(|&i| b.snapshots[0].values[i]).collect();
    let rel = error_norms(&ua, &ub).unwrap().1.unwrap();
    let pass = rel <= 0.05;
    report(9, "classical limit vs reference", pass, format!("relative L2 at t = 0.05 s: {rel:.4e} (bound 5e-2)"));
    assert!(pass);
}

#[test]
fn criterion_10_irregular_domain() {
    let _g = serial();
    let l_shape = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(1000.0, 0.0),
        Point::new(1000.0, 500.0),
        Point::new(500.0, 500.0),
        Point::new(500.0, 1000.0),
        Point::new(0.0, 1000.0),
    ])
    .unwrap();
    let mut desk = Desk::new(100.0);
    desk.domain = Domain2D::Polygon(l_shape);
    desk.source = Point::new(250.0, 250.0);
    desk.t_end = 10.001;
    desk.monitor_every = 1;
    desk.snapshots = (0..=10).map(f64::from).collect();
    let out = run(&desk.scenario()).expect("run completes");
    let (stable, initial, max) = bounded(&out, 2.0);
    let ratio = worst_boundary_ratio(&out);
    let pass = stable && ratio <= 1e-6 && out.steps == 10_000;
    report(
        10,
        "irregular domain",
        pass,
        format!("L-shape, 10000 steps, initial peak {initial:.4e}, max {max:.4e}, worst boundary/peak {ratio:.3e}"),
    );
    assert!(pass);
}
