//! Sphere-cluster hydrodynamics at small radius: single-sphere traction
//! eigenrelations, the interaction matrix `A` and the 6×6 grand resistance
//! system of a self-propelled cluster.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix6, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result, Violation};
use crate::jet::{Jet, JetSpace};
use crate::jet3::Jet3;
use crate::linalg::Mat;
use crate::quadrature::GaussLegendre;
use crate::scalar::{cross3, dot3, m3_to_na, sub3, v3, Scalar, M3, V3};
use crate::swimmer::{wall_top, Limits};
use crate::wall::{
    dz_green_wall_g, green_flat_g, images_g, k4_from_derivatives, stokeslet_g, FluidParams,
    QuadSpec, WallProfile,
};

/// Traction eigenvalue for rigid translations of a sphere: `3μa/2`.
pub fn lambda_translation(a: f64, fluid: &FluidParams) -> f64 {
    1.5 * fluid.mu * a
}

/// Traction eigenvalue for rigid rotations of a sphere: `3μa`.
pub fn lambda_rotation(a: f64, fluid: &FluidParams) -> f64 {
    3.0 * fluid.mu * a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidKind {
    Translation,
    Rotation,
}

/// Traction produced by a rigid boundary velocity on a sphere of radius `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtnResponse {
    pub lambda: f64,
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

/// Tractions are densities per unit-sphere area element in the
/// parametrisation `x = x_i + a r`.
pub fn dtn_rigid(kind: RigidKind, direction: &Vector3<f64>, a: f64, fluid: &FluidParams) -> Result<DtnResponse> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {a}")));
    }
    let n = direction.norm();
    if !(n > 0.0) {
        return Err(Error::InvalidParameter("direction must be nonzero".into()));
    }
    let e = direction / n;
    Ok(match kind {
        RigidKind::Translation => {
            let lambda = lambda_translation(a, fluid);
            DtnResponse {
                lambda,
                force: e * (lambda * 4.0 * PI),
                torque: Vector3::zeros(),
            }
        }
        RigidKind::Rotation => {
            let lambda = lambda_rotation(a, fluid);
            // ∫ a r × (λ e × a r) dσ = λ a² ∫ (e − (r·e) r) dσ = λ a² (8π/3) e
            DtnResponse {
                lambda,
                force: Vector3::zeros(),
                torque: e * (lambda * a * a * 8.0 * PI / 3.0),
            }
        }
    })
}

/// Stokes drag of a translating sphere, `6πμa`.
pub fn drag_translation(a: f64, mu: f64) -> f64 {
    6.0 * PI * mu * a
}

/// Rotational drag of a sphere, `8πμa³`.
pub fn drag_rotation(a: f64, mu: f64) -> f64 {
    8.0 * PI * mu * a * a * a
}

/// `∫_{S²} G(a(r − s)) c dσ(s)` at a point `r` of the unit sphere.
///
/// The rule is written in polar coordinates around `r`, which cancels the
/// `1/|r − s|` singularity against the surface element.
pub fn single_layer_quadrature(
    density: &Vector3<f64>,
    a: f64,
    fluid: &FluidParams,
    r: &Vector3<f64>,
    n_polar: usize,
    n_azimuth: usize,
) -> Result<Vector3<f64>> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {a}")));
    }
    let pole = r.normalize();
    let helper = if pole.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let t1 = pole.cross(&helper).normalize();
    let t2 = pole.cross(&t1);
    let gl = GaussLegendre::get(n_polar);
    let dphi = 2.0 * PI / n_azimuth as f64;
    let mut acc = Vector3::zeros();
    for (th, w) in gl.mapped(0.0, PI) {
        let (st, ct) = th.sin_cos();
        for k in 0..n_azimuth {
            let p = (k as f64 + 0.5) * dphi;
            let s = pole * ct + (t1 * p.cos() + t2 * p.sin()) * st;
            let d = (pole - s) * a;
            let g = m3_to_na(&stokeslet_g(&[d.x, d.y, d.z], fluid.mu));
            acc += g * density * (w * st * dphi);
        }
    }
    Ok(acc)
}

/// Sphere centers sharing a radius, immersed above a (possibly rough) wall.
#[derive(Debug, Clone)]
pub struct SphereCluster {
    pub centers: Vec<[f64; 3]>,
    pub a: f64,
    pub fluid: FluidParams,
    pub profile: WallProfile,
}

impl SphereCluster {
    pub fn validate(&self, limits: &Limits) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {}", self.a)));
        }
        self.profile.validate()?;
        for (i, c) in self.centers.iter().enumerate() {
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::ClusterInvalid(Violation::NonFinite));
            }
            if c[2] - self.a - wall_top(&self.profile) < limits.clearance {
                return Err(Error::ClusterInvalid(Violation::WallClearance));
            }
            for d in &self.centers[i + 1..] {
                let dist = ((c[0] - d[0]).powi(2) + (c[1] - d[1]).powi(2) + (c[2] - d[2]).powi(2)).sqrt();
                if dist <= 2.0 * self.a {
                    return Err(Error::ClusterInvalid(Violation::Overlap));
                }
            }
        }
        Ok(())
    }
}

/// Fixed planar rule for the roughness kernel: nodes with weights `w·h(s)`.
#[derive(Debug, Clone)]
pub struct WallRule {
    pub nodes: Vec<([f64; 2], f64)>,
    pub epsilon: f64,
    pub order: usize,
}

impl WallRule {
    pub fn flat() -> Self {
        WallRule {
            nodes: Vec::new(),
            epsilon: 0.0,
            order: 0,
        }
    }

    /// Picks the quadrature order at which every roughness block of the
    /// cluster has converged.
    pub fn for_centers(centers: &[[f64; 3]], profile: &WallProfile, fluid: &FluidParams, quad: &QuadSpec) -> Result<Self> {
        if profile.epsilon == 0.0 {
            return Ok(WallRule::flat());
        }
        let pts: Vec<V3<f64>> = centers.iter().map(|c| v3(c[0], c[1], c[2])).collect();
        let (_, order) = quad.converge_with_order(|n| {
            let rule = WallRule {
                nodes: profile.weighted_nodes(n),
                epsilon: profile.epsilon,
                order: n,
            };
            let blocks = rule.k4_blocks(&pts, fluid.mu);
            blocks.iter().flat_map(|b| b.iter().flatten().copied()).collect()
        })?;
        Ok(WallRule {
            nodes: profile.weighted_nodes(order),
            epsilon: profile.epsilon,
            order,
        })
    }

    pub fn is_flat(&self) -> bool {
        self.epsilon == 0.0 || self.nodes.is_empty()
    }

    /// All `K₄(x_i, x_j)` blocks, row-major in `(i, j)`.
    ///
    /// For jet-valued centers the wall sum is done once on the Taylor expansion
    /// of each block in the six coordinates of its two centers, then composed
    /// with the center jets.
    pub fn k4_blocks<T: Scalar>(&self, centers: &[V3<T>], mu: f64) -> Vec<M3<T>> {
        let n = centers.len();
        if self.is_flat() {
            return (0..n * n).map(|_| crate::scalar::zero_m3()).collect();
        }
        let c0: Vec<[f64; 3]> = centers
            .iter()
            .map(|c| [c[0].value(), c[1].value(), c[2].value()])
            .collect();
        let degree = centers.iter().flatten().map(|v| v.taylor_degree()).max().unwrap_or(0);
        let poly = self.k4_taylor(&c0, mu, degree);
        let space6 = JetSpace::get(6, degree);
        let exps = space6.exponents();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let delta: Vec<T> = (0..6)
                    .map(|m| {
                        let (c, k) = if m < 3 { (i, m) } else { (j, m - 3) };
                        centers[c][k].clone() - c0[c][k]
                    })
                    .collect();
                // monomials of δ, each built from an earlier one times one variable
                let mut mono: Vec<T> = Vec::with_capacity(exps.len());
                for e in exps {
                    match e.iter().position(|&p| p > 0) {
                        None => mono.push(T::from(1.0)),
                        Some(v) => {
                            let mut parent = e.clone();
                            parent[v] -= 1;
                            let k = space6.monomial_index(&parent).expect("parent monomial");
                            let m = mono[k].clone() * delta[v].clone();
                            mono.push(m);
                        }
                    }
                }
                let coef = &poly[i * n + j];
                out.push(std::array::from_fn(|p| {
                    std::array::from_fn(|q| {
                        let c = &coef[3 * p + q];
                        let mut acc = T::from(c[0]);
                        for (k, m) in mono.iter().enumerate().skip(1) {
                            if c[k] != 0.0 {
                                acc = acc + m.clone() * c[k];
                            }
                        }
                        acc
                    })
                }));
            }
        }
        out
    }

    /// Taylor coefficients (six-variable layout of degree `degree`) of every
    /// block `−ε μ Σ w h D(s, x_i)ᵀ D(s, x_j)` in `(δx_i, δx_j)`.
    fn k4_taylor(&self, c0: &[[f64; 3]], mu: f64, degree: usize) -> Vec<[Vec<f64>; 9]> {
        let n = c0.len();
        let space3 = JetSpace::get(3, degree);
        let space6 = JetSpace::get(6, degree);
        let e3 = space3.exponents();
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        for (a, ea) in e3.iter().enumerate() {
            for (b, eb) in e3.iter().enumerate() {
                let d: usize = ea.iter().chain(eb).map(|&x| x as usize).sum();
                if d <= degree {
                    let e: Vec<u8> = ea.iter().chain(eb).copied().collect();
                    pairs.push((a, b, space6.monomial_index(&e).expect("six-variable monomial")));
                }
            }
        }
        let len3 = space3.len();
        let len6 = space6.len();
        let blocks = n * n * 9;
        let acc = self
            .nodes
            .par_iter()
            .fold(
                || vec![0.0; blocks * len6],
                |mut acc, &(s, wh)| {
                    // dz[i][k][p] as a coefficient vector in the centre's 3 variables
                    let dz: Vec<Vec<f64>> = c0
                        .iter()
                        .map(|c| {
                            if degree == 0 {
                                let d = dz_green_wall_g(s, c, mu);
                                return d.iter().flatten().copied().collect();
                            }
                            let mut flat = vec![0.0; 9 * len3];
                            if degree == 3 {
                                let d = dz_green_wall_g(s, &Jet3::seed(c), mu);
                                for k in 0..3 {
                                    for p in 0..3 {
                                        flat[(3 * k + p) * len3..][..len3].copy_from_slice(&d[k][p].0);
                                    }
                                }
                                return flat;
                            }
                            let d = dz_green_wall_g(s, &seed3(c, degree), mu);
                            for k in 0..3 {
                                for p in 0..3 {
                                    let src = d[k][p].coeffs();
                                    flat[(3 * k + p) * len3..][..src.len()].copy_from_slice(src);
                                }
                            }
                            flat
                        })
                        .collect();
                    for i in 0..n {
                        for j in 0..n {
                            for p in 0..3 {
                                for q in 0..3 {
                                    let dst = &mut acc[((i * n + j) * 9 + 3 * p + q) * len6..][..len6];
                                    for k in 0..3 {
                                        let u = &dz[i][(3 * k + p) * len3..][..len3];
                                        let v = &dz[j][(3 * k + q) * len3..][..len3];
                                        for &(a, b, o) in &pairs {
                                            dst[o] += wh * u[a] * v[b];
                                        }
                                    }
                                }
                            }
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0.0; blocks * len6],
                |mut x, y| {
                    x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                    x
                },
            );
        let scale = -self.epsilon * mu;
        (0..n * n)
            .map(|b| std::array::from_fn(|e| acc[(b * 9 + e) * len6..][..len6].iter().map(|v| v * scale).collect()))
            .collect()
    }
}

fn seed3(c: &[f64; 3], degree: usize) -> V3<Jet> {
    let s = Jet::seed(c, degree);
    [s[0].clone(), s[1].clone(), s[2].clone()]
}

/// Correction parts of the interaction matrix: `A = Id + a1 + a2`.
#[derive(Debug, Clone)]
pub struct InteractionParts<T> {
    /// Flat-wall images on the diagonal, Stokeslet plus images off it.
    pub a1: Mat<T>,
    /// Roughness kernel blocks.
    pub a2: Mat<T>,
}

impl<T: Scalar> InteractionParts<T> {
    pub fn full(&self) -> Mat<T> {
        Mat::identity(self.a1.rows).add(&self.a1).add(&self.a2)
    }
}

pub fn assemble_a_g<T: Scalar>(centers: &[V3<T>], a: f64, mu: f64, rule: &WallRule) -> InteractionParts<T> {
    let n = centers.len();
    let k = -drag_translation(a, mu);
    let mut a1 = Mat::zeros(3 * n, 3 * n);
    for i in 0..n {
        for j in 0..n {
            let kern = if i == j {
                images_g(&centers[i], &centers[i], mu)
            } else {
                green_flat_g(&centers[i], &centers[j], mu)
            };
            a1.set_block3(i, j, &scale(&kern, k));
        }
    }
    let mut a2 = Mat::zeros(3 * n, 3 * n);
    if !rule.is_flat() {
        let blocks = rule.k4_blocks(centers, mu);
        for i in 0..n {
            for j in 0..n {
                a2.set_block3(i, j, &scale(&blocks[i * n + j], k));
            }
        }
    }
    InteractionParts { a1, a2 }
}

/// Roughness part of `A` with the planar integral replaced by the integrand at `s`:
/// blocks `−6πμa K₄int(s, x_i, x_j)`.
pub fn a2_integrand_g<T: Scalar>(s: [f64; 2], centers: &[V3<T>], a: f64, mu: f64) -> Mat<T> {
    let n = centers.len();
    let k = -drag_translation(a, mu);
    let d: Vec<M3<T>> = centers.iter().map(|c| dz_green_wall_g(s, c, mu)).collect();
    let mut out = Mat::zeros(3 * n, 3 * n);
    for i in 0..n {
        for j in 0..n {
            out.set_block3(i, j, &scale(&k4_from_derivatives(&d[i], &d[j], mu), k));
        }
    }
    out
}

fn scale<T: Scalar>(m: &M3<T>, k: f64) -> M3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].clone() * k))
}

/// Assembled interaction matrix with its split.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    pub a: DMatrix<f64>,
    pub a1: Option<DMatrix<f64>>,
    pub a2: Option<DMatrix<f64>>,
}

pub fn assemble_a(cluster: &SphereCluster, split: bool, quad: &QuadSpec, limits: &Limits) -> Result<InteractionMatrix> {
    cluster.validate(limits)?;
    let rule = WallRule::for_centers(&cluster.centers, &cluster.profile, &cluster.fluid, quad)?;
    let pts: Vec<V3<f64>> = cluster.centers.iter().map(|c| v3(c[0], c[1], c[2])).collect();
    let parts = assemble_a_g(&pts, cluster.a, cluster.fluid.mu, &rule);
    let a = parts.full().map_value();
    Ok(if split {
        InteractionMatrix {
            a,
            a1: Some(parts.a1.map_value()),
            a2: Some(parts.a2.map_value()),
        }
    } else {
        InteractionMatrix { a, a1: None, a2: None }
    })
}

/// Grand resistance matrices in a given frame.
#[derive(Debug, Clone)]
pub struct GrandResistance {
    /// Rows: torque components then force components; columns: rotation then
    /// translation modes, all in the frame basis.
    pub m: Matrix6<f64>,
    /// One column per shape-rate input.
    pub n: DMatrix<f64>,
}

/// `M` and `N` of the self-propulsion system from the interaction matrix.
///
/// Rigid mode `k ∈ 0..3` rotates the cluster about `basis[k]` through `xc`
/// (spheres also spin); modes `3..6` translate along `basis[k]`. `shape` holds
/// sphere-center velocities (3N rows) per shape rate. Forces on the body are
/// `−6πμa (A U)_i` per sphere and spin torques `−8πμa³ Ω`.
pub fn grand_resistance_g<T: Scalar>(
    centers: &[V3<T>],
    xc: &V3<T>,
    basis: &[V3<T>; 3],
    a: f64,
    mu: f64,
    amat: &Mat<T>,
    shape: &Mat<T>,
) -> (Mat<T>, Mat<T>) {
    let n = centers.len();
    let arms: Vec<V3<T>> = centers.iter().map(|c| sub3(c, xc)).collect();
    let mut modes = Mat::zeros(3 * n, 6);
    for k in 0..3 {
        for (i, arm) in arms.iter().enumerate() {
            let v = cross3(&basis[k], arm);
            for p in 0..3 {
                modes.set(3 * i + p, k, v[p].clone());
                modes.set(3 * i + p, 3 + k, basis[k][p].clone());
            }
        }
    }
    let drag = drag_translation(a, mu);
    let spin = drag_rotation(a, mu) * n as f64;
    let project = |vel: &Mat<T>, spin_of: &dyn Fn(usize) -> Option<usize>| -> Mat<T> {
        let av = amat.mul(vel);
        let mut out = Mat::zeros(6, vel.cols);
        for c in 0..vel.cols {
            let forces: Vec<V3<T>> = (0..n)
                .map(|i| std::array::from_fn(|p| av.get(3 * i + p, c).clone() * (-drag)))
                .collect();
            let mut torque: V3<T> = [T::zero(), T::zero(), T::zero()];
            let mut total: V3<T> = [T::zero(), T::zero(), T::zero()];
            for i in 0..n {
                let t = cross3(&arms[i], &forces[i]);
                for p in 0..3 {
                    torque[p] = torque[p].clone() + t[p].clone();
                    total[p] = total[p].clone() + forces[i][p].clone();
                }
            }
            for k in 0..3 {
                let mut tk = dot3(&basis[k], &torque);
                if spin_of(c) == Some(k) {
                    tk = tk - spin;
                }
                out.set(k, c, tk);
                out.set(3 + k, c, dot3(&basis[k], &total));
            }
        }
        out
    };
    let m = project(&modes, &|c| if c < 3 { Some(c) } else { None });
    let nn = project(shape, &|_| None);
    (m, nn)
}

pub fn grand_resistance(
    cluster: &SphereCluster,
    xc: [f64; 3],
    basis: [[f64; 3]; 3],
    shape: &DMatrix<f64>,
    quad: &QuadSpec,
    limits: &Limits,
) -> Result<GrandResistance> {
    cluster.validate(limits)?;
    let n = cluster.centers.len();
    if shape.nrows() != 3 * n {
        return Err(Error::InvalidParameter(format!(
            "shape velocities need {} rows, got {}",
            3 * n,
            shape.nrows()
        )));
    }
    let rule = WallRule::for_centers(&cluster.centers, &cluster.profile, &cluster.fluid, quad)?;
    let pts: Vec<V3<f64>> = cluster.centers.iter().map(|c| v3(c[0], c[1], c[2])).collect();
    let amat = assemble_a_g(&pts, cluster.a, cluster.fluid.mu, &rule).full();
    let mut sh = Mat::zeros(shape.nrows(), shape.ncols());
    for i in 0..shape.nrows() {
        for j in 0..shape.ncols() {
            sh.set(i, j, shape[(i, j)]);
        }
    }
    let (m, nn) = grand_resistance_g(&pts, &v3(xc[0], xc[1], xc[2]), &basis, cluster.a, cluster.fluid.mu, &amat, &sh);
    let m = Matrix6::from_fn(|i, j| *m.get(i, j));
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSolve { cond: f64::INFINITY });
    }
    Ok(GrandResistance { m, n: nn.map_value() })
}
