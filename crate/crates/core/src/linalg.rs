//! Dense LU with partial pivoting and one step of iterative refinement.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{Error, Result};

/// A factorized square matrix. The original matrix is kept for the
/// refinement residual.
pub struct DenseLu {
    matrix: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    indicator: f64,
}

impl DenseLu {
    pub fn new(matrix: DMatrix<f64>, what: &str) -> Result<Self> {
        assert!(matrix.is_square(), "LU of a non-square matrix");
        let lu = matrix.clone().lu();
        let u = lu.u();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for d in u.diagonal().iter() {
            lo = lo.min(d.abs());
            hi = hi.max(d.abs());
        }
        let indicator = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        // Pivot ratio beyond 1/eps means the factors carry no digits.
        if !indicator.is_finite() || indicator > 1.0 / f64::EPSILON {
            return Err(Error::Conditioning { what: what.to_string(), indicator });
        }
        Ok(Self { matrix, lu, indicator })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Ratio of the largest to the smallest pivot magnitude; a cheap lower
    /// bound proxy for the condition number.
    pub fn condition_indicator(&self) -> f64 {
        self.indicator
    }

    pub fn solve_plain(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(rhs).expect("factorization checked nonsingular")
    }

    /// Solve and apply one refinement pass `x += A^{-1} (b - A x)`.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.solve_plain(rhs);
        let residual = rhs - &self.matrix * &x;
        x += self.solve_plain(&residual);
        x
    }

    pub fn residual_inf(&self, x: &DVector<f64>, rhs: &DVector<f64>) -> f64 {
        (rhs - &self.matrix * x).amax()
    }
}
