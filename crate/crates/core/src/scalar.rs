//! Scalar abstraction shared by plain `f64` evaluation and Taylor-jet evaluation.
//!
//! Every kernel and field in the crate is written once against [`Scalar`], so the
//! same code path produces values (with `f64`) and exact truncated derivatives
//! (with [`crate::jet::Jet`]).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + Debug
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Constant (zeroth-order) part.
    fn value(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn recip(&self) -> Self;

    /// Highest Taylor degree carried (0 for plain numbers).
    fn taylor_degree(&self) -> usize {
        0
    }

    fn zero() -> Self {
        Self::from(0.0)
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::from(1.0);
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

/// 3-vector over a scalar.
pub type V3<T> = [T; 3];
/// 3×3 matrix over a scalar, row-major.
pub type M3<T> = [[T; 3]; 3];

pub fn v3<T: Scalar>(x: f64, y: f64, z: f64) -> V3<T> {
    [T::from(x), T::from(y), T::from(z)]
}

pub fn add3<T: Scalar>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [
        a[0].clone() + b[0].clone(),
        a[1].clone() + b[1].clone(),
        a[2].clone() + b[2].clone(),
    ]
}

pub fn sub3<T: Scalar>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [
        a[0].clone() - b[0].clone(),
        a[1].clone() - b[1].clone(),
        a[2].clone() - b[2].clone(),
    ]
}

pub fn scale3<T: Scalar>(a: &V3<T>, s: &T) -> V3<T> {
    [
        a[0].clone() * s.clone(),
        a[1].clone() * s.clone(),
        a[2].clone() * s.clone(),
    ]
}

pub fn dot3<T: Scalar>(a: &V3<T>, b: &V3<T>) -> T {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

pub fn cross3<T: Scalar>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

pub fn norm3<T: Scalar>(a: &V3<T>) -> T {
    dot3(a, a).sqrt()
}

pub fn zero_m3<T: Scalar>() -> M3<T> {
    std::array::from_fn(|_| std::array::from_fn(|_| T::zero()))
}

pub fn add_m3<T: Scalar>(a: &M3<T>, b: &M3<T>) -> M3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() + b[i][j].clone()))
}

pub fn scale_m3<T: Scalar>(a: &M3<T>, s: f64) -> M3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() * s))
}

pub fn transpose_m3<T: Scalar>(a: &M3<T>) -> M3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

/// `aᵀ·b`.
pub fn tmul_m3<T: Scalar>(a: &M3<T>, b: &M3<T>) -> M3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            a[0][i].clone() * b[0][j].clone()
                + a[1][i].clone() * b[1][j].clone()
                + a[2][i].clone() * b[2][j].clone()
        })
    })
}

pub fn m3_to_na(m: &M3<f64>) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::from_fn(|i, j| m[i][j])
}

pub fn v3_from_na(v: &nalgebra::Vector3<f64>) -> V3<f64> {
    [v.x, v.y, v.z]
}
