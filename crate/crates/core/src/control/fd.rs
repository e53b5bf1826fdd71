//! Finite-difference Jacobians and Lie brackets. These serve as an independent
//! check on the jet-based derivatives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSpec {
    /// Relative step: `h_j = step_scale · max(1, |x_j|)`, rounded to a power of two.
    pub step_scale: f64,
    /// Combine steps `h` and `h/2` to cancel the leading error term.
    pub richardson: bool,
}

impl Default for FdSpec {
    fn default() -> Self {
        FdSpec {
            step_scale: 1e-4,
            richardson: false,
        }
    }
}

impl FdSpec {
    pub fn scaled(&self, k: f64) -> FdSpec {
        FdSpec {
            step_scale: self.step_scale * k,
            ..*self
        }
    }
}

fn stencil_column(
    field: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    j: usize,
    h: f64,
) -> Result<DVector<f64>> {
    let mut pts = Vec::with_capacity(4);
    for k in [-2.0, -1.0, 1.0, 2.0] {
        let mut y = x.to_vec();
        y[j] += k * h;
        let v = field(&y).map_err(|e| if e.is_validation() { Error::StepTooLarge } else { e })?;
        pts.push(DVector::from_vec(v));
    }
    Ok((&pts[0] - &pts[3] + (&pts[2] - &pts[1]) * 8.0) / (12.0 * h))
}

/// Jacobian `∂F_i/∂x_j` by the five-point central stencil.
pub fn jacobian_fd(
    field: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    spec: &FdSpec,
) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        // nearest power of two, so that x ± kh is exact in floating point
        let h = (spec.step_scale * x[j].abs().max(1.0)).log2().round().exp2();
        let mut c = stencil_column(field, x, j, h)?;
        if spec.richardson {
            let half = stencil_column(field, x, j, 0.5 * h)?;
            c = (half * 16.0 - c) / 15.0;
        }
        cols.push(c);
    }
    Ok(DMatrix::from_columns(&cols))
}

/// `[F, G](x) = DG(x) F(x) − DF(x) G(x)`.
pub fn lie_bracket(
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    g: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    spec: &FdSpec,
) -> Result<Vec<f64>> {
    let fx = DVector::from_vec(f(x)?);
    let gx = DVector::from_vec(g(x)?);
    let dg = jacobian_fd(g, x, spec)?;
    let df = jacobian_fd(f, x, spec)?;
    Ok((dg * fx - df * gx).as_slice().to_vec())
}
