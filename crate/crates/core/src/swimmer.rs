//! Swimmer geometry: the collinear three-sphere swimmer and the tetrahedral
//! four-sphere swimmer, their kinematic matrices and admissibility checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::linalg::Mat;
use crate::scalar::{add3, cross3, scale3, Scalar, M3, V3};
use crate::wall::WallProfile;

/// Three-sphere state `(ξ₁, ξ₂, θ, φ, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State3 {
    pub xi1: f64,
    pub xi2: f64,
    pub theta: f64,
    pub phi: f64,
    pub xc: [f64; 3],
}

impl State3 {
    pub fn new(xi1: f64, xi2: f64, theta: f64, phi: f64, xc: [f64; 3]) -> Self {
        State3 {
            xi1,
            xi2,
            theta,
            phi,
            xc,
        }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.xi1, self.xi2, self.theta, self.phi, self.xc[0], self.xc[1], self.xc[2],
        ]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        assert_eq!(x.len(), 7, "three-sphere state has 7 components");
        State3::new(x[0], x[1], x[2], x[3], [x[4], x[5], x[6]])
    }
}

/// Four-sphere state: arm lengths, center, rotation vector (axis · angle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State4 {
    pub xi: [f64; 4],
    pub xc: [f64; 3],
    pub rot: [f64; 3],
}

impl State4 {
    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[..4].copy_from_slice(&self.xi);
        out[4..7].copy_from_slice(&self.xc);
        out[7..].copy_from_slice(&self.rot);
        out
    }

    pub fn from_slice(x: &[f64]) -> Self {
        assert_eq!(x.len(), 10, "four-sphere state has 10 components");
        State4 {
            xi: [x[0], x[1], x[2], x[3]],
            xc: [x[4], x[5], x[6]],
            rot: [x[7], x[8], x[9]],
        }
    }
}

/// Admissibility thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Lower bound on `|sin θ|`.
    pub delta_angle: f64,
    /// Minimal gap between a sphere and the highest point of the wall.
    pub clearance: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            delta_angle: 0.1,
            clearance: 0.5,
        }
    }
}

/// Orthonormal frame `(e₁, e₂, e₃)` attached to the swimmer axis.
pub fn frame3<T: Scalar>(theta: &T, phi: &T) -> [V3<T>; 3] {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    [
        [cp.clone() * st.clone(), sp.clone() * st.clone(), ct.clone()],
        [cp.clone() * ct.clone(), sp.clone() * ct, -st],
        [-sp, cp, T::zero()],
    ]
}

/// Centers `x₁ = x_c − ξ₁e₁`, `x₂ = x_c`, `x₃ = x_c + ξ₂e₁` from a 7-component state.
pub fn centers3<T: Scalar>(x: &[T]) -> [V3<T>; 3] {
    let e = frame3(&x[2], &x[3]);
    let xc: V3<T> = [x[4].clone(), x[5].clone(), x[6].clone()];
    [
        add3(&xc, &scale3(&e[0], &(-x[0].clone()))),
        xc.clone(),
        add3(&xc, &scale3(&e[0], &x[1])),
    ]
}

/// Unit vectors from the center of a regular tetrahedron to its vertices.
pub fn tetra_directions() -> [[f64; 3]; 4] {
    let k = 1.0 / 3f64.sqrt();
    [[k, k, k], [k, -k, -k], [-k, k, -k], [-k, -k, k]]
}

// Series coefficients of sin θ/θ and (1 − cos θ)/θ² in powers of θ².
fn rodrigues_coeffs() -> ([f64; 12], [f64; 12]) {
    let mut a = [0.0; 12];
    let mut b = [0.0; 12];
    let mut fact = 1.0; // (2k+1)!
    for k in 0..12 {
        if k > 0 {
            fact *= (2 * k) as f64 * (2 * k + 1) as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        a[k] = sign / fact;
        b[k] = sign / (fact * (2 * k + 2) as f64);
    }
    (a, b)
}

fn horner<T: Scalar>(coef: &[f64], x: &T) -> T {
    let mut acc = T::from(coef[coef.len() - 1]);
    for c in coef.iter().rev().skip(1) {
        acc = acc * x.clone() + *c;
    }
    acc
}

fn skew<T: Scalar>(r: &V3<T>) -> M3<T> {
    let z = T::zero();
    [
        [z.clone(), -r[2].clone(), r[1].clone()],
        [r[2].clone(), z.clone(), -r[0].clone()],
        [-r[1].clone(), r[0].clone(), z],
    ]
}

fn mat3_mul<T: Scalar>(a: &M3<T>, b: &M3<T>) -> M3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            a[i][0].clone() * b[0][j].clone()
                + a[i][1].clone() * b[1][j].clone()
                + a[i][2].clone() * b[2][j].clone()
        })
    })
}

fn identity_plus<T: Scalar>(k1: &T, m1: &M3<T>, k2: &T, m2: &M3<T>) -> M3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let d = if i == j { 1.0 } else { 0.0 };
            k1.clone() * m1[i][j].clone() + k2.clone() * m2[i][j].clone() + d
        })
    })
}

/// Rotation matrix of a rotation vector (Rodrigues), smooth through zero.
pub fn rotation_matrix<T: Scalar>(r: &V3<T>) -> M3<T> {
    let t2 = r[0].clone() * r[0].clone() + r[1].clone() * r[1].clone() + r[2].clone() * r[2].clone();
    let (ka, kb) = if t2.value() < 0.25 {
        let (a, b) = rodrigues_coeffs();
        (horner(&a, &t2), horner(&b, &t2))
    } else {
        let t = t2.sqrt();
        (t.sin() / t.clone(), (-t.cos() + 1.0) / t2.clone())
    };
    let k = skew(r);
    let k2 = mat3_mul(&k, &k);
    identity_plus(&ka, &k, &kb, &k2)
}

/// Inverse left Jacobian: maps a space-frame angular velocity ω to the rate of
/// the rotation vector.
pub fn inv_left_jacobian<T: Scalar>(r: &V3<T>) -> M3<T> {
    let t2 = r[0].clone() * r[0].clone() + r[1].clone() * r[1].clone() + r[2].clone() * r[2].clone();
    // c(θ) = 1/θ² − (1 + cos θ)/(2θ sin θ) = −Σ_{n≥1} (−1)^n B_{2n} θ^{2n−2}/(2n)!
    let c = if t2.value() < 0.25 {
        const B: [f64; 10] = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
            43867.0 / 798.0,
            -174611.0 / 330.0,
        ];
        let mut coef = [0.0; 10];
        let mut fact = 1.0;
        for n in 1..=10 {
            fact *= (2 * n - 1) as f64 * (2 * n) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            coef[n - 1] = -sign * B[n - 1] / fact;
        }
        horner(&coef, &t2)
    } else {
        let t = t2.sqrt();
        t2.recip() - (t.cos() + 1.0) / (t.clone() * t.sin() * 2.0)
    };
    let k = skew(r);
    let k2 = mat3_mul(&k, &k);
    identity_plus(&T::from(-0.5), &k, &c, &k2)
}

/// Centers `x_c + ξ_i R d_i` from a 10-component state.
pub fn centers4<T: Scalar>(x: &[T]) -> [V3<T>; 4] {
    let r: V3<T> = [x[7].clone(), x[8].clone(), x[9].clone()];
    let rot = rotation_matrix(&r);
    let d = tetra_directions();
    std::array::from_fn(|i| {
        let rd: V3<T> = std::array::from_fn(|k| {
            rot[k][0].clone() * d[i][0] + rot[k][1].clone() * d[i][1] + rot[k][2].clone() * d[i][2]
        });
        std::array::from_fn(|k| x[4 + k].clone() + x[i].clone() * rd[k].clone())
    })
}

/// Rotated arm directions `R d_i`.
pub fn arm_directions4<T: Scalar>(x: &[T]) -> [V3<T>; 4] {
    let r: V3<T> = [x[7].clone(), x[8].clone(), x[9].clone()];
    let rot = rotation_matrix(&r);
    let d = tetra_directions();
    std::array::from_fn(|i| {
        std::array::from_fn(|k| {
            rot[k][0].clone() * d[i][0] + rot[k][1].clone() * d[i][1] + rot[k][2].clone() * d[i][2]
        })
    })
}

/// Kinematic matrices of the three-sphere self-propulsion system.
#[derive(Debug, Clone)]
pub struct KinematicMatrices<T> {
    /// 6×9: total force rows, then total torque rows about the middle sphere.
    pub s: Mat<T>,
    /// 5×9: `s` without the torque component along the axis.
    pub s_red: Mat<T>,
    /// 9×5: sphere velocities per unit `(θ̇, φ̇, ẋ, ẏ, ż)`.
    pub t_red: Mat<T>,
    /// 9×2: sphere velocities per unit shape rate.
    pub u: Mat<T>,
}

fn cross_matrix_rows<T: Scalar>(m: &mut Mat<T>, row0: usize, col0: usize, v: &V3<T>, k: f64) {
    // [v]× scaled by k
    let z = T::zero();
    let c = [
        [z.clone(), -v[2].clone(), v[1].clone()],
        [v[2].clone(), z.clone(), -v[0].clone()],
        [-v[1].clone(), v[0].clone(), z],
    ];
    for (i, row) in c.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.set(row0 + i, col0 + j, x.clone() * k);
        }
    }
}

pub fn matrices_stu<T: Scalar>(x: &[T]) -> KinematicMatrices<T> {
    let (xi1, xi2) = (x[0].clone(), x[1].clone());
    let e = frame3(&x[2], &x[3]);
    let sin_t = x[2].sin();

    let mut s = Mat::zeros(6, 9);
    for b in 0..3 {
        for k in 0..3 {
            s.set(k, 3 * b + k, T::from(1.0));
        }
    }
    let e1_neg: V3<T> = scale3(&e[0], &(-xi1.clone()));
    let e1_pos: V3<T> = scale3(&e[0], &xi2);
    cross_matrix_rows(&mut s, 3, 0, &e1_neg, 1.0);
    cross_matrix_rows(&mut s, 3, 6, &e1_pos, 1.0);

    // Torque components along e₂ and e₃: e_m·(e₁ × F) = (e_m × e₁)·F.
    let mut s_red = Mat::zeros(5, 9);
    for b in 0..3 {
        for k in 0..3 {
            s_red.set(k, 3 * b + k, T::from(1.0));
        }
    }
    let e2xe1 = cross3(&e[1], &e[0]);
    let e3xe1 = cross3(&e[2], &e[0]);
    for k in 0..3 {
        s_red.set(3, k, -xi1.clone() * e2xe1[k].clone());
        s_red.set(3, 6 + k, xi2.clone() * e2xe1[k].clone());
        s_red.set(4, k, -xi1.clone() * e3xe1[k].clone());
        s_red.set(4, 6 + k, xi2.clone() * e3xe1[k].clone());
    }

    let mut t_red = Mat::zeros(9, 5);
    for k in 0..3 {
        t_red.set(k, 0, -xi1.clone() * e[1][k].clone());
        t_red.set(k, 1, -xi1.clone() * sin_t.clone() * e[2][k].clone());
        t_red.set(6 + k, 0, xi2.clone() * e[1][k].clone());
        t_red.set(6 + k, 1, xi2.clone() * sin_t.clone() * e[2][k].clone());
        for b in 0..3 {
            t_red.set(3 * b + k, 2 + k, T::from(1.0));
        }
    }

    let mut u = Mat::zeros(9, 2);
    for k in 0..3 {
        u.set(k, 0, -e[0][k].clone());
        u.set(6 + k, 1, e[0][k].clone());
    }

    KinematicMatrices { s, s_red, t_red, u }
}

/// Outcome of an admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub ok: bool,
    pub violation: Option<Violation>,
}

impl Admissibility {
    fn pass() -> Self {
        Admissibility {
            ok: true,
            violation: None,
        }
    }
    fn fail(v: Violation) -> Self {
        Admissibility {
            ok: false,
            violation: Some(v),
        }
    }

    pub fn into_result(self) -> Result<()> {
        match self.violation {
            None => Ok(()),
            Some(v) => Err(Error::StateInvalid(v)),
        }
    }
}

/// Highest point of the wall above z = 0.
pub fn wall_top(profile: &WallProfile) -> f64 {
    // Every family peaks at h = 1 by construction.
    profile.epsilon
}

fn clearance_ok(centers: &[[f64; 3]], a: f64, profile: &WallProfile, limits: &Limits) -> bool {
    let top = wall_top(profile);
    centers.iter().all(|c| c[2] - a - top >= limits.clearance)
}

fn pairwise_ok(centers: &[[f64; 3]], a: f64) -> bool {
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d: f64 = (0..3).map(|k| (centers[i][k] - centers[j][k]).powi(2)).sum::<f64>().sqrt();
            if d <= 2.0 * a {
                return false;
            }
        }
    }
    true
}

pub fn validate_state3(state: &State3, a: f64, profile: &WallProfile, limits: &Limits) -> Admissibility {
    let x = state.to_array();
    if x.iter().any(|v| !v.is_finite()) {
        return Admissibility::fail(Violation::NonFinite);
    }
    if state.xi1 <= 2.0 * a || state.xi2 <= 2.0 * a {
        return Admissibility::fail(Violation::ArmTooShort);
    }
    if state.theta.sin().abs() < limits.delta_angle {
        return Admissibility::fail(Violation::AngleDegenerate);
    }
    if !clearance_ok(&centers3(&x), a, profile, limits) {
        return Admissibility::fail(Violation::WallClearance);
    }
    Admissibility::pass()
}

pub fn validate_state4(state: &State4, a: f64, profile: &WallProfile, limits: &Limits) -> Admissibility {
    let x = state.to_array();
    if x.iter().any(|v| !v.is_finite()) {
        return Admissibility::fail(Violation::NonFinite);
    }
    let min_arm = (1.5f64).sqrt() * a;
    if state.xi.iter().any(|&xi| xi <= min_arm) {
        return Admissibility::fail(Violation::ArmTooShort);
    }
    let angle = state.rot.iter().map(|v| v * v).sum::<f64>().sqrt();
    if angle >= std::f64::consts::PI {
        return Admissibility::fail(Violation::ChartRange);
    }
    let c = centers4(&x);
    if !pairwise_ok(&c, a) {
        return Admissibility::fail(Violation::Overlap);
    }
    if !clearance_ok(&c, a, profile, limits) {
        return Admissibility::fail(Violation::WallClearance);
    }
    Admissibility::pass()
}
