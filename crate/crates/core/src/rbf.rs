//! Multiquadric basis, kernel matrices and the interpolation solve.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point, PointCloud};
use crate::linalg::DenseLu;

/// `phi(r) = sqrt(r^2 + p^2)` with shape parameter `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiquadric {
    shape: f64,
}

impl Multiquadric {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::Domain(format!("shape parameter must be positive, got {shape}")));
        }
        Ok(Self { shape })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::Domain(format!("negative radius {r}")));
        }
        Ok(self.eval(r))
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        r.hypot(self.shape)
    }

    /// `phi` from a squared radius.
    #[inline]
    pub fn eval_r2(&self, r2: f64) -> f64 {
        (r2 + self.shape * self.shape).sqrt()
    }

    #[inline]
    pub fn between(&self, a: Point, b: Point) -> f64 {
        self.eval_r2(a.dist2(b))
    }
}

/// Entry `(i, j) = phi(|rows_i - cols_j|)`.
pub fn kernel_matrix(basis: &Multiquadric, rows: &[Point], cols: &[Point]) -> DMatrix<f64> {
    let data: Vec<f64> = rows
        .par_iter()
        .flat_map_iter(|&r| cols.iter().map(move |&c| basis.between(r, c)))
        .collect();
    DMatrix::from_row_slice(rows.len(), cols.len(), &data)
}

/// Coefficients reproducing `values` at every collocation point.
///
/// `diagonal_shift` is added to the system diagonal; zero solves the plain
/// interpolation problem.
pub fn interpolate(basis: &Multiquadric, cloud: &PointCloud, values: &[f64], diagonal_shift: f64) -> Result<Vec<f64>> {
    let n = cloud.len();
    if values.len() != n {
        return Err(Error::Config(format!("{} values for {} collocation points", values.len(), n)));
    }
    let pts = cloud.points();
    let mut a = kernel_matrix(basis, &pts, &pts);
    if diagonal_shift != 0.0 {
        for i in 0..n {
            a[(i, i)] += diagonal_shift;
        }
    }
    let lu = DenseLu::new(a, "interpolation matrix")?;
    solve_checked(&lu, values, "interpolation matrix")
}

/// Refined solve with the residual bound `1e-8 (1 + |b|_inf)`.
pub(crate) fn solve_checked(lu: &DenseLu, values: &[f64], what: &str) -> Result<Vec<f64>> {
    let b = DVector::from_column_slice(values);
    let x = lu.solve(&b);
    let bound = 1e-8 * (1.0 + b.amax());
    let res = lu.residual_inf(&x, &b);
    if !(res <= bound) {
        return Err(Error::Conditioning { what: format!("{what} (residual {res:.3e})"), indicator: lu.condition_indicator() });
    }
    Ok(x.as_slice().to_vec())
}

/// `sum_j lambda_j phi(|t - source_j|)` at each target.
pub fn evaluate(basis: &Multiquadric, sources: &[Point], lambda: &[f64], targets: &[Point]) -> Vec<f64> {
    assert_eq!(sources.len(), lambda.len());
    targets
        .par_iter()
        .map(|&t| sources.iter().zip(lambda).map(|(&s, &l)| l * basis.between(t, s)).sum())
        .collect()
}
