//! Dense row-major matrices and the handful of BLAS-1/2 kernels the layers
//! need. Vectors are carried as plain slices; parameter vectors (biases,
//! attention context) are stored as `n x 1` matrices so optimizers can treat
//! every parameter array uniformly.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    /// Column vector of zeros.
    pub fn zero_vector(n: usize) -> Self {
        Self::zeros(n, 1)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(rows * cols, data.len(), "shape/element count mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.rows, self.cols)
    }

    pub fn fill(&mut self, v: F) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    /// `y = W x` for a column vector `x`.
    pub fn matvec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        let mut y = vec![F::zero(); self.rows];
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = F::zero();
            for (w, xv) in row.iter().zip(x) {
                acc += *w * *xv;
            }
            y[r] = acc;
        }
        y
    }

    /// `y = W^T g`.
    pub fn matvec_t(&self, g: &[F]) -> Vec<F> {
        assert_eq!(self.rows, g.len(), "matvec_t shape mismatch");
        let mut y = vec![F::zero(); self.cols];
        for r in 0..self.rows {
            let gr = g[r];
            if gr == F::zero() {
                continue;
            }
            for (yc, w) in y.iter_mut().zip(self.row(r)) {
                *yc += *w * gr;
            }
        }
        y
    }

    /// Rank-1 update `self += g x^T`.
    pub fn add_outer(&mut self, g: &[F], x: &[F]) {
        assert_eq!(self.rows, g.len());
        assert_eq!(self.cols, x.len());
        for r in 0..self.rows {
            let gr = g[r];
            if gr == F::zero() {
                continue;
            }
            for (w, xv) in self.row_mut(r).iter_mut().zip(x) {
                *w += gr * *xv;
            }
        }
    }

    /// `self += a * other`, elementwise.
    pub fn axpy(&mut self, a: F, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * *o;
        }
    }

    pub fn scale(&mut self, a: F) {
        self.data.iter_mut().for_each(|x| *x *= a);
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.shape() == (rows, cols) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: format!("{}x{}", rows, cols),
                got: format!("{}x{}", self.rows, self.cols),
            })
        }
    }
}

/// Dot product of two equal-length slices.
pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

pub fn add_assign<F: Real>(a: &mut [F], b: &[F]) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += *y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_identity() {
        let mut w = Matrix::<f64>::zeros(2, 2);
        w.set(0, 0, 1.0);
        w.set(1, 1, 1.0);
        assert_eq!(w.matvec(&[2.0, 3.0]), vec![2.0, 3.0]);
    }

    #[test]
    fn outer_product_rows() {
        let mut w = Matrix::<f64>::zeros(2, 2);
        w.add_outer(&[1.0, 0.0], &[2.0, 3.0]);
        assert_eq!(w.row(0), &[2.0, 3.0]);
        assert_eq!(w.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn matvec_t_is_transpose() {
        let w = Matrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(w.matvec_t(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn shape_check_reports_both_shapes() {
        let w = Matrix::<f64>::zeros(2, 3);
        let err = w.check_shape(3, 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("3x2") && msg.contains("2x3"), "{msg}");
    }
}
