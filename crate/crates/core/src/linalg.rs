//! Small dense matrices over a generic [`Scalar`].
//!
//! nalgebra is used for the `f64` public surface; this type exists so the same
//! solves can run on jets.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, M3};

#[derive(Clone, Debug)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::from(1.0));
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn set_block3(&mut self, bi: usize, bj: usize, b: &M3<T>) {
        for (r, row) in b.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                self.set(3 * bi + r, 3 * bj + c, v.clone());
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * o.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * k).collect(),
        }
    }

    pub fn neg(&self) -> Mat<T> {
        self.scale(-1.0)
    }

    pub fn map_value(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value())
    }

    /// Solves `self · X = b` by LU with partial pivoting on the base values.
    ///
    /// The pivot sequence is chosen from the constant parts, which keeps the
    /// elimination identical across `f64` and jet evaluations.
    pub fn solve(&self, b: &Mat<T>) -> Result<Mat<T>> {
        let n = self.rows;
        assert_eq!(n, self.cols, "square matrix required");
        assert_eq!(b.rows, n, "dimension mismatch");
        let mut a = self.clone();
        let mut x = b.clone();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    a.get(i, k)
                        .value()
                        .abs()
                        .total_cmp(&a.get(j, k).value().abs())
                })
                .expect("non-empty range");
            if a.get(p, k).value() == 0.0 || !a.get(p, k).value().is_finite() {
                return Err(Error::SingularSolve { cond: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                for j in 0..x.cols {
                    x.data.swap(k * x.cols + j, p * x.cols + j);
                }
            }
            let inv = a.get(k, k).recip();
            for i in k + 1..n {
                let f = a.get(i, k).clone() * inv.clone();
                for j in k + 1..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                    a.set(i, j, v);
                }
                for j in 0..x.cols {
                    let v = x.get(i, j).clone() - f.clone() * x.get(k, j).clone();
                    x.set(i, j, v);
                }
            }
        }
        for k in (0..n).rev() {
            let inv = a.get(k, k).recip();
            for j in 0..x.cols {
                let mut acc = x.get(k, j).clone();
                for i in k + 1..n {
                    acc = acc - a.get(k, i).clone() * x.get(i, j).clone();
                }
                x.set(k, j, acc * inv.clone());
            }
        }
        Ok(x)
    }

    /// Determinant by elimination (small matrices only).
    pub fn det(&self) -> T {
        let n = self.rows;
        assert_eq!(n, self.cols, "square matrix required");
        let mut a = self.clone();
        let mut det = T::from(1.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    a.get(i, k)
                        .value()
                        .abs()
                        .total_cmp(&a.get(j, k).value().abs())
                })
                .expect("non-empty range");
            if a.get(p, k).value() == 0.0 {
                return T::zero();
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let inv = a.get(k, k).recip();
            for i in k + 1..n {
                let f = a.get(i, k).clone() * inv.clone();
                for j in k + 1..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                    a.set(i, j, v);
                }
            }
            det = det * a.get(k, k).clone();
        }
        det
    }
}

/// 2-norm condition number of a real matrix.
pub fn condition_number(m: &nalgebra::DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &nalgebra::DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}
