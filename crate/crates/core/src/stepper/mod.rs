//! Collocation system assembly and the two-level time recurrence.
//!
//! Multiplying the collocated equation at interior point `i` by
//! `c_i^2 dt^2` gives, row by row,
//!
//! ```text
//! [Phi_d - tau dt C^2 Phi_a] l^{n+1}
//!     = [2 Phi_d + eta dt^2 C^2 Phi_s - tau dt C^2 Phi_a] l^n - Phi_d l^{n-1} + dt^2 C^2 f^n
//! Phi_b l^{n+1} = 0
//! ```
//!
//! where `Phi_s` and `Phi_a` are the fractional Laplacians of orders
//! `gamma + 1` and `gamma + 1/2` applied to the basis. The left-hand side is
//! constant in time and factorized once.

mod run;

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fraclap::{frac_laplacian_matrices, frac_laplacian_matrix, FracOpConfig};
use crate::geometry::{Domain2D, Point, PointCloud};
use crate::linalg::DenseLu;
use crate::media::{sample_velocity, EquationMode, MediumParams, VelocityField};
use crate::rbf::{self, kernel_matrix, Multiquadric};

pub use run::{run, ricker, ForceTerm, InitialField, RunAborted, RunOutput, Scenario, Snapshot, SnapshotGrid};

/// Everything a time step needs, built once per scenario.
pub struct SystemMatrices {
    pub phi_d: DMatrix<f64>,
    pub phi_b: DMatrix<f64>,
    /// Order `gamma + 1` operator (or the Laplacian in attenuation mode).
    pub phi_disp: DMatrix<f64>,
    /// Order `gamma + 1/2` operator; `None` when `tau` vanishes everywhere.
    pub phi_atten: Option<DMatrix<f64>>,
    /// Reference velocity `c0` sampled at each interior point.
    pub c0: Vec<f64>,
    /// Phase velocity `c` entering the diagonal `C`.
    pub c_phase: Vec<f64>,
    pub eta: Vec<f64>,
    pub tau: Vec<f64>,
    pub dt: f64,
    /// `2 Phi_d + eta dt^2 C^2 Phi_s - tau dt C^2 Phi_a`.
    current: DMatrix<f64>,
    lhs: DenseLu,
    pub operator_time: Duration,
    pub factor_time: Duration,
}

/// Knobs of the discrete system besides the physics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub op: FracOpConfig,
    pub mode: EquationMode,
    pub dt: f64,
    /// Added to the interpolation-matrix diagonal; zero by default.
    pub diagonal_shift: f64,
}

pub fn assemble(
    basis: &Multiquadric,
    cloud: &PointCloud,
    domain: &Domain2D,
    medium: &MediumParams,
    velocity: &VelocityField,
    opts: &AssemblyOptions,
) -> Result<SystemMatrices> {
    if cloud.m() == 0 {
        return Err(Error::Config("no interior collocation points".into()));
    }
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(Error::Config(format!("time step must be positive, got {}", opts.dt)));
    }
    let dt = opts.dt;
    let sources = cloud.points();

    let mut c0 = Vec::with_capacity(cloud.m());
    let mut terms = Vec::with_capacity(cloud.m());
    for p in &cloud.interior {
        let v = sample_velocity(velocity, p.x, p.y)?;
        c0.push(v);
        terms.push(medium.mode_terms(opts.mode, v));
    }
    let disp_exponent = terms[0].dispersion_exponent;
    let atten_exponent = terms[0].attenuation_exponent;
    let eta: Vec<f64> = terms.iter().map(|t| t.eta).collect();
    let tau: Vec<f64> = terms.iter().map(|t| t.tau).collect();
    let c_phase: Vec<f64> = terms.iter().map(|t| t.c_phase).collect();

    let phi_d = kernel_matrix(basis, &cloud.interior, &sources);
    let phi_b = kernel_matrix(basis, &cloud.boundary, &sources);

    let started = Instant::now();
    let (phi_disp, phi_atten) = if tau.iter().all(|&t| t == 0.0) {
        (frac_laplacian_matrix(basis, cloud, domain, disp_exponent, &opts.op)?, None)
    } else {
        let [s, a] = frac_laplacian_matrices(basis, cloud, domain, [disp_exponent, atten_exponent], &opts.op)?;
        (s, Some(a))
    };
    let operator_time = started.elapsed();

    let m = cloud.m();
    let mut current = &phi_d * 2.0;
    let mut lhs = DMatrix::zeros(cloud.len(), cloud.len());
    lhs.rows_mut(0, m).copy_from(&phi_d);
    lhs.rows_mut(m, cloud.n()).copy_from(&phi_b);
    for i in 0..m {
        let c2 = c_phase[i] * c_phase[i];
        let disp = eta[i] * dt * dt * c2;
        let att = tau[i] * dt * c2;
        for j in 0..cloud.len() {
            current[(i, j)] += disp * phi_disp[(i, j)];
            if let Some(a) = &phi_atten {
                current[(i, j)] -= att * a[(i, j)];
                lhs[(i, j)] -= att * a[(i, j)];
            }
        }
    }
    if opts.diagonal_shift != 0.0 {
        for i in 0..cloud.len() {
            lhs[(i, i)] += opts.diagonal_shift;
        }
    }
    let started = Instant::now();
    let lhs = DenseLu::new(lhs, "time-step left-hand side")?;
    let factor_time = started.elapsed();

    Ok(SystemMatrices { phi_d, phi_b, phi_disp, phi_atten, c0, c_phase, eta, tau, dt, current, lhs, operator_time, factor_time })
}

impl SystemMatrices {
    pub fn m(&self) -> usize {
        self.phi_d.nrows()
    }

    pub fn n(&self) -> usize {
        self.phi_b.nrows()
    }

    pub fn lhs(&self) -> &DenseLu {
        &self.lhs
    }

    /// Stacked `[Phi_d; Phi_b]` interpolation matrix.
    pub fn interpolation_matrix(&self) -> DMatrix<f64> {
        let (m, n) = (self.m(), self.n());
        let mut a = DMatrix::zeros(m + n, m + n);
        a.rows_mut(0, m).copy_from(&self.phi_d);
        a.rows_mut(m, n).copy_from(&self.phi_b);
        a
    }

    /// Field values at the interior and boundary collocation points.
    pub fn collocation_values(&self, lambda: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.phi_d * lambda, &self.phi_b * lambda)
    }

    /// Interior right-hand side for the step producing `l^{n+1}`.
    fn rhs(&self, state: &StepperState, force: Option<&[f64]>) -> DVector<f64> {
        let m = self.m();
        let mut interior = &self.current * &state.lambda_curr;
        interior.gemv(-1.0, &self.phi_d, &state.lambda_prev, 1.0);
        if let Some(f) = force {
            assert_eq!(f.len(), m, "force needs one value per interior point");
            for i in 0..m {
                interior[i] += self.dt * self.dt * self.c_phase[i] * self.c_phase[i] * f[i];
            }
        }
        let mut rhs = DVector::zeros(m + self.n());
        rhs.rows_mut(0, m).copy_from(&interior);
        rhs
    }
}

/// Coefficient vectors of the two most recent time layers.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperState {
    pub lambda_prev: DVector<f64>,
    pub lambda_curr: DVector<f64>,
    /// Index of `lambda_curr`; layer `n` sits at `t = (n - 1) dt`.
    pub n: usize,
    pub dt: f64,
}

impl StepperState {
    pub fn time(&self) -> f64 {
        (self.n - 1) as f64 * self.dt
    }
}

/// Interpolates the initial field (boundary entries set to zero) and starts
/// at layer 2 with `l^2 = l^1`, the discrete zero initial velocity.
pub fn initialize(sys: &SystemMatrices, cloud: &PointCloud, sigma0: &[f64], diagonal_shift: f64) -> Result<StepperState> {
    let total = cloud.len();
    if sigma0.len() != total {
        return Err(Error::Config(format!("{} initial values for {} points", sigma0.len(), total)));
    }
    if let Some(bad) = sigma0.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("initial field is not finite ({bad})")));
    }
    let mut values = sigma0.to_vec();
    values[cloud.m()..].iter_mut().for_each(|v| *v = 0.0);
    let mut a = sys.interpolation_matrix();
    if diagonal_shift != 0.0 {
        for i in 0..total {
            a[(i, i)] += diagonal_shift;
        }
    }
    let lu = DenseLu::new(a, "interpolation matrix")?;
    let lambda = DVector::from_vec(rbf::solve_checked(&lu, &values, "interpolation matrix")?);
    Ok(StepperState { lambda_prev: lambda.clone(), lambda_curr: lambda, n: 2, dt: sys.dt })
}

/// Advances one layer. `force` holds `f_i^n` at the interior points.
pub fn step(sys: &SystemMatrices, state: &mut StepperState, force: Option<&[f64]>) -> Result<()> {
    assert!(state.n >= 2, "stepping needs two initial layers");
    let rhs = sys.rhs(state, force);
    let next = sys.lhs.solve_plain(&rhs);
    if next.iter().any(|v| !v.is_finite()) {
        let max_magnitude = state.lambda_curr.amax();
        return Err(Error::Instability { step: state.n + 1, max_magnitude });
    }
    state.lambda_prev = std::mem::replace(&mut state.lambda_curr, next);
    state.n += 1;
    Ok(())
}

/// Field values `sum_j lambda_j phi(|t - x_j|)` at arbitrary targets.
pub fn evaluate(basis: &Multiquadric, cloud: &PointCloud, lambda: &[f64], targets: &[Point]) -> Vec<f64> {
    rbf::evaluate(basis, &cloud.points(), lambda, targets)
}
