//! Minimal dense complex matrix helpers for the small linear problems that
//! show up in block inversion, Gram pairings and projector analysis.

use crate::scalar::{Complex64, ZERO};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inverse by Gauss-Jordan with partial pivoting. Returns `None` when the
    /// pivot drops below `tol`.
    pub fn inverse(&self, tol: f64) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best <= tol {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let u = a[(col, j)];
                    let v = inv[(col, j)];
                    a[(r, j)] -= f * u;
                    inv[(r, j)] -= f * v;
                }
            }
        }
        Some(inv)
    }

    /// Numerical rank via row elimination with column pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let (rows, cols) = (a.rows, a.cols);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let mut pivot = row;
            let mut best = 0.0;
            for r in row..rows {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best <= tol {
                continue;
            }
            if pivot != row {
                for j in 0..cols {
                    a.data.swap(row * cols + j, pivot * cols + j);
                }
            }
            let p = a[(row, col)];
            for r in row + 1..rows {
                let f = a[(r, col)] / p;
                if f == ZERO {
                    continue;
                }
                for j in col..cols {
                    let u = a[(row, j)];
                    a[(r, j)] -= f * u;
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_fn(3, 3, |i, j| {
            Complex64::new((i * 3 + j) as f64 + if i == j { 5.0 } else { 0.0 }, 0.3 * j as f64)
        });
        let inv = m.inverse(1e-12).unwrap();
        let prod = m.mul(&inv);
        assert!(prod.sub(&Mat::identity(3)).max_norm() < 1e-10);
    }

    #[test]
    fn rank_detects_deficiency() {
        let mut m = Mat::zeros(3, 3);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(2.0, 0.0);
        m[(2, 0)] = Complex64::new(3.0, 0.0);
        assert_eq!(m.rank(1e-12), 2);
    }
}
