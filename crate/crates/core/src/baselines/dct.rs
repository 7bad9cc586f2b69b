//! Orthonormal 2-D DCT-II by separable matrix products.

use nalgebra::DMatrix;

/// `C[k][n] = a_k cos(π (2n + 1) k / 2N)` with `a_0 = √(1/N)`, `a_k = √(2/N)`.
pub fn dct_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |k, i| {
        let a = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        a * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos()
    })
}

#[derive(Debug, Clone)]
pub struct Dct2d {
    rows: DMatrix<f64>,
    cols: DMatrix<f64>,
}

impl Dct2d {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            rows: dct_matrix(height),
            cols: dct_matrix(width),
        }
    }

    pub fn forward(&self, plane: &DMatrix<f64>) -> DMatrix<f64> {
        &self.rows * plane * self.cols.transpose()
    }

    pub fn inverse(&self, coeffs: &DMatrix<f64>) -> DMatrix<f64> {
        self.rows.transpose() * coeffs * &self.cols
    }
}
