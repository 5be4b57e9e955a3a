//! Scalar conventions: complex doubles compared up to a global tolerance.

pub use num_complex::Complex64;

/// Comparison tolerance used for all approximate equality in the toolkit.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Tol(pub f64);

impl Default for Tol {
    fn default() -> Self {
        Tol(1e-9)
    }
}

impl Tol {
    pub fn eq(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.0
    }

    pub fn is_zero(&self, a: Complex64) -> bool {
        a.norm() <= self.0
    }

    pub fn eq_real(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }
}

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Max-norm distance between two equal-length coefficient slices.
pub fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
