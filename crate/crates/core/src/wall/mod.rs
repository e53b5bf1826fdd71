//! Stokes Green kernels above a no-slip plane `z = 0` and the first-order
//! correction for a wall perturbed to `z = ε h(x, y)`.
//!
//! Conventions: the kernel `K(r, r0)` maps a point force at the source `r0` to
//! the velocity at the field point `r`. All generic `*_g` functions take the
//! source as a [`Scalar`] vector so they can be evaluated on jets.

mod profile;

pub use profile::{ProfileKind, QuadSpec, WallProfile};

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{m3_to_na, norm3, sub3, tmul_m3, v3, zero_m3, Scalar, M3, V3};

pub type Kernel33 = Matrix3<f64>;

/// Below this separation two points are treated as coincident.
pub const SEPARATION_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub mu: f64,
}

impl Default for FluidParams {
    fn default() -> Self {
        FluidParams { mu: 1.0 }
    }
}

impl FluidParams {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {mu}")));
        }
        Ok(FluidParams { mu })
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Free-space Stokeslet `(1/8πμ)(I/|r| + r⊗r/|r|³)`.
pub fn stokeslet_g<T: Scalar>(r: &V3<T>, mu: f64) -> M3<T> {
    let inv = norm3(r).recip();
    let inv3 = inv.clone() * inv.clone() * inv.clone();
    let k = 1.0 / (8.0 * PI * mu);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (inv.clone() * delta(i, j) + r[i].clone() * r[j].clone() * inv3.clone()) * k
        })
    })
}

/// Sum of the three image kernels for a source at `r0` and field point `r`.
pub fn images_g<T: Scalar>(r: &V3<T>, r0: &V3<T>, mu: f64) -> M3<T> {
    let h = r0[2].clone();
    let rp: V3<T> = [
        r[0].clone() - r0[0].clone(),
        r[1].clone() - r0[1].clone(),
        r[2].clone() + h.clone(),
    ];
    let inv = norm3(&rp).recip();
    let inv2 = inv.clone() * inv.clone();
    let inv3 = inv2.clone() * inv.clone();
    let inv5 = inv3.clone() * inv2.clone();
    let c8 = 1.0 / (8.0 * PI * mu);
    let c4 = 1.0 / (4.0 * PI * mu);
    let h2 = h.clone() * h.clone();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let cj = 1.0 - 2.0 * delta(j, 2);
            let rirj = rp[i].clone() * rp[j].clone();
            let k1 = -(inv.clone() * delta(i, j) + rirj.clone() * inv3.clone()) * c8;
            let k2 = h2.clone()
                * (inv3.clone() * delta(i, j) - rirj.clone() * inv5.clone() * 3.0)
                * (c4 * cj);
            let k3 = -h.clone()
                * ((rp[2].clone() * delta(i, j) - rp[j].clone() * delta(i, 2)
                    + rp[i].clone() * delta(j, 2))
                    * inv3.clone()
                    - rirj * rp[2].clone() * inv5.clone() * 3.0)
                * (c4 * cj);
            k1 + k2 + k3
        })
    })
}

/// Flat-wall Green kernel: Stokeslet plus images.
pub fn green_flat_g<T: Scalar>(r: &V3<T>, r0: &V3<T>, mu: f64) -> M3<T> {
    let g = stokeslet_g(&sub3(r, r0), mu);
    let im = images_g(r, r0, mu);
    std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].clone() + im[i][j].clone()))
}

/// `∂/∂z` of the flat-wall kernel in its field argument, evaluated on the wall at
/// `(s1, s2, 0)`, for a source at `x0`.
pub fn dz_green_wall_g<T: Scalar>(s: [f64; 2], x0: &V3<T>, mu: f64) -> M3<T> {
    let h = x0[2].clone();
    let d0 = -(x0[0].clone() - s[0]);
    let d1 = -(x0[1].clone() - s[1]);
    // direct separation r = s − x0 and image separation R = s − x̃0
    let r: V3<T> = [d0.clone(), d1.clone(), -h.clone()];
    let big: V3<T> = [d0, d1, h.clone()];
    let ir = norm3(&r).recip();
    let ir2 = ir.clone() * ir.clone();
    let ir3 = ir2.clone() * ir.clone();
    let ir5 = ir3.clone() * ir2.clone();
    let ir7 = ir5.clone() * ir2.clone();
    let c8 = 1.0 / (8.0 * PI * mu);
    let c4 = 1.0 / (4.0 * PI * mu);
    let h2 = h.clone() * h.clone();
    // |r| = |R| on the wall, so the same inverse powers serve both.
    let stokes_like = |v: &V3<T>, i: usize, j: usize| -> T {
        -(v[2].clone() * ir3.clone() * delta(i, j))
            + (v[j].clone() * delta(i, 2) + v[i].clone() * delta(j, 2)) * ir3.clone()
            - v[i].clone() * v[j].clone() * v[2].clone() * ir5.clone() * 3.0
    };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let cj = 1.0 - 2.0 * delta(j, 2);
            let g = stokes_like(&r, i, j) * c8;
            let k1 = -stokes_like(&big, i, j) * c8;
            let rr = big[i].clone() * big[j].clone();
            let k2 = h2.clone()
                * (-(big[2].clone() * ir5.clone() * (3.0 * delta(i, j)))
                    - (big[j].clone() * delta(i, 2) + big[i].clone() * delta(j, 2))
                        * ir5.clone()
                        * 3.0
                    + rr.clone() * big[2].clone() * ir7.clone() * 15.0)
                * (c4 * cj);
            let bracket = big[2].clone() * delta(i, j) - big[j].clone() * delta(i, 2)
                + big[i].clone() * delta(j, 2);
            let k3 = -h.clone()
                * (ir3.clone() * delta(i, j)
                    - big[2].clone() * bracket * ir5.clone() * 3.0
                    - (big[j].clone() * big[2].clone() * delta(i, 2)
                        + big[i].clone() * big[2].clone() * delta(j, 2)
                        + rr.clone())
                        * ir5.clone()
                        * 3.0
                    + rr * big[2].clone() * big[2].clone() * ir7.clone() * 15.0)
                * (c4 * cj);
            g + k1 + k2 + k3
        })
    })
}

/// Integrand of the roughness kernel: `μ · D(s, r)ᵀ · D(s, rp)` with
/// `D = dz_green_wall`. The transpose sits on the factor belonging to the field
/// point, which is what a Poisson-kernel representation of the correction gives
/// and makes the integrated kernel reciprocal.
pub fn k4_integrand_g<T: Scalar>(s: [f64; 2], r: &V3<T>, rp: &V3<T>, mu: f64) -> M3<T> {
    let dr = dz_green_wall_g(s, r, mu);
    let drp = dz_green_wall_g(s, rp, mu);
    k4_from_derivatives(&dr, &drp, mu)
}

pub(crate) fn k4_from_derivatives<T: Scalar>(dr: &M3<T>, drp: &M3<T>, mu: f64) -> M3<T> {
    let p = tmul_m3(dr, drp);
    std::array::from_fn(|i| std::array::from_fn(|j| p[i][j].clone() * mu))
}

/// `−ε Σ_q w_q h(s_q) K4int(s_q, r, rp)` on a fixed node set.
pub fn k4_fixed_g<T: Scalar>(
    nodes: &[([f64; 2], f64)],
    epsilon: f64,
    r: &V3<T>,
    rp: &V3<T>,
    mu: f64,
) -> M3<T> {
    let mut acc = zero_m3::<T>();
    for &(s, wh) in nodes {
        let k = k4_integrand_g(s, r, rp, mu);
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] = acc[i][j].clone() + k[i][j].clone() * wh;
            }
        }
    }
    std::array::from_fn(|i| std::array::from_fn(|j| acc[i][j].clone() * (-epsilon)))
}

fn check_point(p: &[f64; 3]) -> Result<()> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("non-finite coordinate".into()))
    }
}

fn to_v3(p: &[f64; 3]) -> V3<f64> {
    v3(p[0], p[1], p[2])
}

pub fn stokeslet(r: &[f64; 3], fluid: &FluidParams) -> Result<Kernel33> {
    check_point(r)?;
    let n = norm3(&to_v3(r));
    if n < SEPARATION_EPS {
        return Err(Error::ZeroSeparation(n));
    }
    Ok(m3_to_na(&stokeslet_g(&to_v3(r), fluid.mu)))
}

fn image_separation(r: &[f64; 3], r0: &[f64; 3]) -> f64 {
    ((r[0] - r0[0]).powi(2) + (r[1] - r0[1]).powi(2) + (r[2] + r0[2]).powi(2)).sqrt()
}

pub fn blake_images(r: &[f64; 3], r0: &[f64; 3], fluid: &FluidParams) -> Result<Kernel33> {
    check_point(r)?;
    check_point(r0)?;
    if r0[2] <= 0.0 {
        return Err(Error::InvalidParameter("source must lie above the wall".into()));
    }
    let sep = image_separation(r, r0);
    if sep < SEPARATION_EPS {
        return Err(Error::ImagePointCoincidence(sep));
    }
    Ok(m3_to_na(&images_g(&to_v3(r), &to_v3(r0), fluid.mu)))
}

pub fn green_flat(r: &[f64; 3], r0: &[f64; 3], fluid: &FluidParams) -> Result<Kernel33> {
    let d = [r[0] - r0[0], r[1] - r0[1], r[2] - r0[2]];
    let g = stokeslet(&d, fluid)?;
    Ok(g + blake_images(r, r0, fluid)?)
}

pub fn dz_green_wall(s: [f64; 2], x0: &[f64; 3], fluid: &FluidParams) -> Result<Kernel33> {
    check_point(x0)?;
    if x0[2] <= 0.0 {
        return Err(Error::InvalidParameter("source must lie above the wall".into()));
    }
    Ok(m3_to_na(&dz_green_wall_g(s, &to_v3(x0), fluid.mu)))
}

pub fn k4_integrand(s: [f64; 2], r: &[f64; 3], rp: &[f64; 3], fluid: &FluidParams) -> Result<Kernel33> {
    let dr = dz_green_wall(s, r, fluid)?;
    let drp = dz_green_wall(s, rp, fluid)?;
    Ok(dr.transpose() * drp * fluid.mu)
}

/// Roughness kernel `−ε ∫ h(s) K4int(s, r, rp) ds` with order doubling.
pub fn k4(
    r: &[f64; 3],
    rp: &[f64; 3],
    profile: &WallProfile,
    fluid: &FluidParams,
    quad: &QuadSpec,
) -> Result<Kernel33> {
    check_point(r)?;
    check_point(rp)?;
    if r[2] <= 0.0 || rp[2] <= 0.0 {
        return Err(Error::InvalidParameter("kernel points must lie above the wall".into()));
    }
    if profile.epsilon == 0.0 {
        return Ok(Kernel33::zeros());
    }
    let (vr, vrp) = (to_v3(r), to_v3(rp));
    let eval = |order: usize| -> Kernel33 {
        let nodes = profile.weighted_nodes(order);
        m3_to_na(&k4_fixed_g(&nodes, profile.epsilon, &vr, &vrp, fluid.mu))
    };
    quad.converge(eval)
}

/// Full rough-wall kernel. With `self_interaction` the Stokeslet is omitted, as
/// required for the diagonal blocks of the interaction matrix.
pub fn green_rough(
    r: &[f64; 3],
    rp: &[f64; 3],
    profile: &WallProfile,
    fluid: &FluidParams,
    quad: &QuadSpec,
    self_interaction: bool,
) -> Result<Kernel33> {
    let images = blake_images(r, rp, fluid)?;
    let direct = if self_interaction {
        Kernel33::zeros()
    } else {
        let d = [r[0] - rp[0], r[1] - rp[1], r[2] - rp[2]];
        stokeslet(&d, fluid)?
    };
    Ok(direct + images + k4(r, rp, profile, fluid, quad)?)
}
