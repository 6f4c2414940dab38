//! Small dense matrix helpers for the log-determinant rate expressions.

use crate::error::{Error, Result};
use crate::tol::PSD_TOL;
use nalgebra::{DMatrix, DVector};

/// A symmetric positive semidefinite `M x M` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidCovariance(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let n = matrix.nrows();
        for r in 0..n {
            for c in (r + 1)..n {
                let (x, y) = (matrix[(r, c)], matrix[(c, r)]);
                if (x - y).abs() > PSD_TOL * x.abs().max(y.abs()).max(1.0) {
                    return Err(Error::InvalidCovariance(format!(
                        "not symmetric at ({r}, {c}): {x} vs {y}"
                    )));
                }
            }
        }
        let min_eig = matrix.clone().symmetric_eigen().eigenvalues.min();
        if n > 0 && min_eig < -PSD_TOL {
            return Err(Error::InvalidCovariance(format!(
                "smallest eigenvalue {min_eig:e} is negative"
            )));
        }
        Ok(CovarianceMatrix(matrix))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn zeros(dim: usize) -> Self {
        CovarianceMatrix(DMatrix::zeros(dim, dim))
    }

    /// `diag(sqrt(p)) * corr * diag(sqrt(p))` for a correlation matrix `corr`
    /// (unit diagonal, PSD); the result has diagonal exactly `p`.
    pub fn from_correlation(corr: &DMatrix<f64>, p: &[f64]) -> Result<Self> {
        if corr.nrows() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                found: corr.nrows(),
            });
        }
        let n = p.len();
        let mut s = DMatrix::from_fn(n, n, |r, c| corr[(r, c)] * (p[r] * p[c]).sqrt());
        for k in 0..n {
            s[(k, k)] = p[k];
        }
        CovarianceMatrix::new(s)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn diag(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }
}

/// `H S H^T` for a diagonal `H`.
pub(crate) fn congruence(h: &[f64], s: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(s.nrows(), s.ncols(), |r, c| h[r] * s[(r, c)] * h[c])
}

/// `0.5 * log2 det(m)` through a partially pivoted LU factorization.
/// Returns `-inf` for singular input and NaN for a negative determinant.
pub(crate) fn half_log2_det(m: DMatrix<f64>) -> f64 {
    let det = m.lu().determinant();
    0.5 * det.log2()
}
