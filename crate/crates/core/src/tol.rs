//! Numerical tolerances shared by every module.

/// Relative slack for magnitude comparisons in classification and set
/// membership tests.
pub const TIE_EPS: f64 = 1e-12;

/// Absolute tolerance, in bits, for comparing capacities.
pub const CAPACITY_TOL: f64 = 1e-9;

/// Absolute floor on the smallest eigenvalue of a covariance matrix, and
/// the slack on its diagonal power constraint.
pub const PSD_TOL: f64 = 1e-10;

fn scale(x: f64, y: f64) -> f64 {
    x.abs().max(y.abs())
}

/// `x <= y` with slack towards `true`.
pub fn le(x: f64, y: f64) -> bool {
    x <= y + TIE_EPS * scale(x, y)
}

/// `x >= y` with slack towards `true`.
pub fn ge(x: f64, y: f64) -> bool {
    le(y, x)
}

/// True when `x` and `y` agree to within the tie tolerance.
pub fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= TIE_EPS * scale(x, y)
}
