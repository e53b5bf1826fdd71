//! Parametric roughness profiles `h` with `sup |h| = 1` and compact support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Smooth unit bump `exp(1 − 1/(1 − ρ²/w²))` on the disc of radius `w`; equals 1
/// at the center.
fn bump(dx: f64, dy: f64, w: f64) -> f64 {
    let q = (dx * dx + dy * dy) / (w * w);
    if q >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - q)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProfileKind {
    /// One unit bump.
    GaussianBump { center: [f64; 2], width: f64 },
    /// Unit bump modulated by `cos(k·(x − cx))`; changes sign, still peaks at 1.
    CosineBump {
        center: [f64; 2],
        width: f64,
        wavenumber: f64,
    },
    /// Two bumps with disjoint supports; the second is scaled by `amp2 ∈ [−1, 1]`.
    TwoBump {
        centers: [[f64; 2]; 2],
        widths: [f64; 2],
        amp2: f64,
    },
    /// Two narrow unit bumps of equal width.
    PointPair { centers: [[f64; 2]; 2], width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallProfile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    pub epsilon: f64,
}

impl WallProfile {
    pub fn new(kind: ProfileKind, epsilon: f64) -> Result<Self> {
        let p = WallProfile { kind, epsilon };
        p.validate()?;
        Ok(p)
    }

    /// A flat wall (any shape with zero amplitude).
    pub fn flat() -> Self {
        WallProfile {
            kind: ProfileKind::GaussianBump {
                center: [0.0, 0.0],
                width: 1.0,
            },
            epsilon: 0.0,
        }
    }

    pub fn gaussian_bump(center: [f64; 2], width: f64, epsilon: f64) -> Result<Self> {
        Self::new(ProfileKind::GaussianBump { center, width }, epsilon)
    }

    pub fn two_bump(centers: [[f64; 2]; 2], widths: [f64; 2], amp2: f64, epsilon: f64) -> Result<Self> {
        Self::new(
            ProfileKind::TwoBump {
                centers,
                widths,
                amp2,
            },
            epsilon,
        )
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        WallProfile {
            kind: self.kind.clone(),
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        let positive = |w: f64, what: &str| {
            if w > 0.0 && w.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be positive, got {w}")))
            }
        };
        match &self.kind {
            ProfileKind::GaussianBump { width, .. } => positive(*width, "width"),
            ProfileKind::CosineBump {
                width, wavenumber, ..
            } => {
                positive(*width, "width")?;
                if wavenumber.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("wavenumber must be finite".into()))
                }
            }
            ProfileKind::TwoBump {
                centers,
                widths,
                amp2,
            } => {
                positive(widths[0], "width")?;
                positive(widths[1], "width")?;
                if !(amp2.abs() <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "second bump amplitude must lie in [-1, 1], got {amp2}"
                    )));
                }
                disjoint(centers, widths[0], widths[1])
            }
            ProfileKind::PointPair { centers, width } => {
                positive(*width, "width")?;
                disjoint(centers, *width, *width)
            }
        }
    }

    /// Height function `h` (unit sup-norm).
    pub fn h(&self, s: [f64; 2]) -> f64 {
        match &self.kind {
            ProfileKind::GaussianBump { center, width } => {
                bump(s[0] - center[0], s[1] - center[1], *width)
            }
            ProfileKind::CosineBump {
                center,
                width,
                wavenumber,
            } => {
                let dx = s[0] - center[0];
                (wavenumber * dx).cos() * bump(dx, s[1] - center[1], *width)
            }
            ProfileKind::TwoBump {
                centers,
                widths,
                amp2,
            } => {
                bump(s[0] - centers[0][0], s[1] - centers[0][1], widths[0])
                    + amp2 * bump(s[0] - centers[1][0], s[1] - centers[1][1], widths[1])
            }
            ProfileKind::PointPair { centers, width } => {
                bump(s[0] - centers[0][0], s[1] - centers[0][1], *width)
                    + bump(s[0] - centers[1][0], s[1] - centers[1][1], *width)
            }
        }
    }

    /// Support discs as (center, radius).
    pub fn patches(&self) -> Vec<([f64; 2], f64)> {
        match &self.kind {
            ProfileKind::GaussianBump { center, width } => vec![(*center, *width)],
            ProfileKind::CosineBump { center, width, .. } => vec![(*center, *width)],
            ProfileKind::TwoBump {
                centers, widths, ..
            } => vec![(centers[0], widths[0]), (centers[1], widths[1])],
            ProfileKind::PointPair { centers, width } => {
                vec![(centers[0], *width), (centers[1], *width)]
            }
        }
    }

    /// Largest distance from the origin of the plane at which `h` can be nonzero.
    pub fn support_radius(&self) -> f64 {
        self.patches()
            .iter()
            .map(|(c, w)| (c[0] * c[0] + c[1] * c[1]).sqrt() + w)
            .fold(0.0, f64::max)
    }

    /// Tensor Gauss–Legendre nodes over each support square, with weights
    /// already multiplied by `h`. Nodes where `h` vanishes are dropped.
    pub fn weighted_nodes(&self, order: usize) -> Vec<([f64; 2], f64)> {
        let gl = GaussLegendre::get(order);
        let mut out = Vec::with_capacity(self.patches().len() * order * order);
        for (c, w) in self.patches() {
            for (x, wx) in gl.mapped(c[0] - w, c[0] + w) {
                for (y, wy) in gl.mapped(c[1] - w, c[1] + w) {
                    let hv = self.h([x, y]);
                    if hv != 0.0 {
                        out.push(([x, y], wx * wy * hv));
                    }
                }
            }
        }
        out
    }
}

fn disjoint(centers: &[[f64; 2]; 2], w0: f64, w1: f64) -> Result<()> {
    let d = ((centers[0][0] - centers[1][0]).powi(2) + (centers[0][1] - centers[1][1]).powi(2)).sqrt();
    if d >= w0 + w1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "bump supports overlap; sup-normalisation needs disjoint supports".into(),
        ))
    }
}

/// Planar quadrature controls: start at `min_order` and double until the
/// relative change drops below `tol`, failing past `max_order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub tol: f64,
    pub min_order: usize,
    pub max_order: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            tol: 1e-8,
            min_order: 16,
            max_order: 256,
        }
    }
}

impl QuadSpec {
    /// Runs the doubling loop on a matrix-valued rule.
    pub fn converge(&self, eval: impl Fn(usize) -> nalgebra::Matrix3<f64>) -> Result<nalgebra::Matrix3<f64>> {
        let (v, _) = self.converge_with_order(|n| {
            let m = eval(n);
            m.as_slice().to_vec()
        })?;
        Ok(nalgebra::Matrix3::from_column_slice(&v))
    }

    /// Doubling loop on a vector-valued rule; returns the value and the order used.
    pub fn converge_with_order(&self, eval: impl Fn(usize) -> Vec<f64>) -> Result<(Vec<f64>, usize)> {
        let mut n = self.min_order.max(1);
        let mut prev = eval(n);
        let mut last_change = f64::INFINITY;
        while 2 * n <= self.max_order {
            n *= 2;
            let cur = eval(n);
            let diff: f64 = cur.iter().zip(&prev).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let norm: f64 = cur.iter().map(|a| a * a).sum::<f64>().sqrt();
            last_change = if norm == 0.0 { diff } else { diff / norm };
            if last_change < self.tol || diff == 0.0 {
                return Ok((cur, n));
            }
            prev = cur;
        }
        Err(Error::QuadratureNotConverged {
            order: n,
            change: last_change,
        })
    }
}
