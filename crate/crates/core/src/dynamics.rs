//! Self-propelled dynamics: shape-rate → state-rate fields of both swimmers.
//!
//! The three-sphere swimmer has two pathways. The reduced one solves the
//! five-equation force/torque balance `S̃ A T̃ ṗ = −S̃ A U ξ̇` and supports the
//! split of `A` into orders; the general one solves the full 6×6 grand
//! resistance system and also yields the axial spin Ω₁.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, Mat};
use crate::mobility::{a2_integrand_g, assemble_a_g, grand_resistance_g, WallRule};
use crate::scalar::{Scalar, V3};
use crate::swimmer::{
    arm_directions4, centers3, centers4, frame3, inv_left_jacobian, matrices_stu, validate_state3,
    validate_state4, Limits, State3, State4,
};
use crate::wall::{FluidParams, QuadSpec, WallProfile};

/// Default bound on the condition number of the reduced balance matrix.
pub const COND_GUARD: f64 = 1e12;

/// The three-sphere swimmer in a given fluid above a given wall.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Swimmer3 {
    pub a: f64,
    pub fluid: FluidParams,
    pub profile: WallProfile,
    pub quad: QuadSpec,
    pub limits: Limits,
    pub cond_guard: f64,
}

/// Fields of the two controls, split by order. Each vector has 7 components.
#[derive(Debug, Clone)]
pub struct SplitFields<T> {
    /// Order 1: top block is the unit shape rate.
    pub f0: [Vec<T>; 2],
    /// Order `a` (flat wall and sphere interactions).
    pub f1: [Vec<T>; 2],
    /// Order `aε` (roughness).
    pub f2: [Vec<T>; 2],
    /// Unsplit solve of the reduced system.
    pub total: [Vec<T>; 2],
}

fn embed<T: Scalar>(top: Option<usize>, col: &[T]) -> Vec<T> {
    let mut v = vec![T::zero(), T::zero()];
    if let Some(i) = top {
        v[i] = T::from(1.0);
    }
    v.extend(col.iter().cloned());
    v
}

fn columns<T: Scalar>(m: &Mat<T>, top: bool) -> [Vec<T>; 2] {
    std::array::from_fn(|i| embed(if top { Some(i) } else { None }, &m.column(i)))
}

/// Pieces of the reduced solve shared by the order split and the wall-integrand route.
struct Reduced<T> {
    s_red: Mat<T>,
    t_red: Mat<T>,
    u: Mat<T>,
    centers: [V3<T>; 3],
    /// `F⁰` columns (5×2).
    f0: Mat<T>,
    /// Leading-order sphere velocities `T̃F⁰ + U` (9×2).
    w: Mat<T>,
}

impl Swimmer3 {
    pub fn new(a: f64, fluid: FluidParams, profile: WallProfile) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {a}")));
        }
        profile.validate()?;
        Ok(Swimmer3 {
            a,
            fluid,
            profile,
            quad: QuadSpec::default(),
            limits: Limits::default(),
            cond_guard: COND_GUARD,
        })
    }

    pub fn with_profile(&self, profile: WallProfile) -> Self {
        Swimmer3 {
            profile,
            ..self.clone()
        }
    }

    pub fn with_radius(&self, a: f64) -> Self {
        Swimmer3 { a, ..self.clone() }
    }

    pub fn validate(&self, x: &[f64]) -> Result<()> {
        validate_state3(&State3::from_slice(x), self.a, &self.profile, &self.limits).into_result()
    }

    /// Converged roughness quadrature for the sphere positions at `x`.
    pub fn wall_rule(&self, x: &[f64]) -> Result<WallRule> {
        let c = centers3(x);
        WallRule::for_centers(&c, &self.profile, &self.fluid, &self.quad)
    }

    fn reduced<T: Scalar>(&self, x: &[T]) -> Result<Reduced<T>> {
        let km = matrices_stu(x);
        let st = km.s_red.mul(&km.t_red);
        let su = km.s_red.mul(&km.u);
        let f0 = st.solve(&su)?.neg();
        let w = km.t_red.mul(&f0).add(&km.u);
        Ok(Reduced {
            s_red: km.s_red,
            t_red: km.t_red,
            u: km.u,
            centers: centers3(x),
            f0,
            w,
        })
    }

    /// `−(S̃T̃)⁻¹ S̃ B W` for a correction block `B` of `A`.
    fn correction<T: Scalar>(r: &Reduced<T>, b: &Mat<T>) -> Result<Mat<T>> {
        let st = r.s_red.mul(&r.t_red);
        let rhs = r.s_red.mul(&b.mul(&r.w));
        Ok(st.solve(&rhs)?.neg())
    }

    /// Order-split and total fields on a fixed wall rule.
    pub fn split_fields_g<T: Scalar>(&self, x: &[T], rule: &WallRule) -> Result<SplitFields<T>> {
        let r = self.reduced(x)?;
        let parts = assemble_a_g(&r.centers, self.a, self.fluid.mu, rule);
        let f1 = Self::correction(&r, &parts.a1)?;
        let f2 = Self::correction(&r, &parts.a2)?;
        let a = parts.full();
        let sat = r.s_red.mul(&a.mul(&r.t_red));
        let cond = condition_number(&sat.map_value());
        if !(cond <= self.cond_guard) {
            return Err(Error::SingularSolve { cond });
        }
        let total = sat.solve(&r.s_red.mul(&a.mul(&r.u)))?.neg();
        Ok(SplitFields {
            f0: columns(&r.f0, true),
            f1: columns(&f1, false),
            f2: columns(&f2, false),
            total: columns(&total, true),
        })
    }

    pub fn split_fields(&self, x: &[f64]) -> Result<SplitFields<f64>> {
        self.validate(x)?;
        let rule = self.wall_rule(x)?;
        self.split_fields_g(x, &rule)
    }

    /// Order-`aε` fields with the wall integral replaced by its integrand at `s`;
    /// `F²_i = −ε ∫ h(s) F²_{i,int}(s) ds`.
    pub fn f2_int_g<T: Scalar>(&self, x: &[T], s: [f64; 2]) -> Result<[Vec<T>; 2]> {
        let r = self.reduced(x)?;
        let a2 = a2_integrand_g(s, &r.centers, self.a, self.fluid.mu);
        Ok(columns(&Self::correction(&r, &a2)?, false))
    }

    pub fn f2_int(&self, x: &[f64], s: [f64; 2]) -> Result<[Vec<f64>; 2]> {
        self.validate(x)?;
        self.f2_int_g(x, s)
    }

    /// Fields from the full 6×6 resistance solve; also returns Ω₁ per control.
    pub fn general_fields_g<T: Scalar>(&self, x: &[T], rule: &WallRule) -> Result<([Vec<T>; 2], [T; 2])> {
        let e = frame3(&x[2], &x[3]);
        let c = centers3(x);
        let parts = assemble_a_g(&c, self.a, self.fluid.mu, rule);
        let amat = parts.full();
        let mut shape = Mat::zeros(9, 2);
        for k in 0..3 {
            shape.set(k, 0, -e[0][k].clone());
            shape.set(6 + k, 1, e[0][k].clone());
        }
        let (m, n) = grand_resistance_g(&c, &c[1], &e, self.a, self.fluid.mu, &amat, &shape);
        let cond = condition_number(&m.map_value());
        if !(cond <= self.cond_guard) {
            return Err(Error::SingularSolve { cond });
        }
        let p = m.solve(&n)?.neg();
        let sin_t = x[2].sin();
        let fields = std::array::from_fn(|i| {
            let om2 = p.get(1, i).clone();
            let om3 = p.get(2, i).clone();
            let v: [T; 3] = std::array::from_fn(|k| p.get(3 + k, i).clone());
            let mut out = vec![T::zero(), T::zero()];
            out[i] = T::from(1.0);
            out.push(om3);
            out.push(-om2 / sin_t.clone());
            for comp in 0..3 {
                out.push(
                    v[0].clone() * e[0][comp].clone()
                        + v[1].clone() * e[1][comp].clone()
                        + v[2].clone() * e[2][comp].clone(),
                );
            }
            out
        });
        let omega1 = std::array::from_fn(|i| p.get(0, i).clone());
        Ok((fields, omega1))
    }

    pub fn general_fields(&self, x: &[f64]) -> Result<[Vec<f64>; 2]> {
        self.validate(x)?;
        let rule = self.wall_rule(x)?;
        Ok(self.general_fields_g(x, &rule)?.0)
    }

    /// Axial angular velocity for shape rates `rates`.
    pub fn omega1(&self, x: &[f64], rates: [f64; 2]) -> Result<f64> {
        self.validate(x)?;
        let rule = self.wall_rule(x)?;
        let (_, om) = self.general_fields_g(x, &rule)?;
        Ok(om[0] * rates[0] + om[1] * rates[1])
    }
}

/// The tetrahedral four-sphere swimmer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Swimmer4 {
    pub a: f64,
    pub fluid: FluidParams,
    pub profile: WallProfile,
    pub quad: QuadSpec,
    pub limits: Limits,
    pub cond_guard: f64,
}

impl Swimmer4 {
    pub fn new(a: f64, fluid: FluidParams, profile: WallProfile) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {a}")));
        }
        profile.validate()?;
        Ok(Swimmer4 {
            a,
            fluid,
            profile,
            quad: QuadSpec::default(),
            limits: Limits::default(),
            cond_guard: COND_GUARD,
        })
    }

    pub fn validate(&self, x: &[f64]) -> Result<()> {
        validate_state4(&State4::from_slice(x), self.a, &self.profile, &self.limits).into_result()
    }

    pub fn wall_rule(&self, x: &[f64]) -> Result<WallRule> {
        let c = centers4(x);
        WallRule::for_centers(&c, &self.profile, &self.fluid, &self.quad)
    }

    /// Four 10-component fields `(ξ̇, ẋ_c, ṙ)` per unit arm rate, from the 6×6
    /// solve in the canonical basis.
    pub fn fields_g<T: Scalar>(&self, x: &[T], rule: &WallRule) -> Result<[Vec<T>; 4]> {
        let c = centers4(x);
        let dirs = arm_directions4(x);
        let xc: V3<T> = [x[4].clone(), x[5].clone(), x[6].clone()];
        let amat = assemble_a_g(&c, self.a, self.fluid.mu, rule).full();
        let mut shape = Mat::zeros(12, 4);
        for i in 0..4 {
            for k in 0..3 {
                shape.set(3 * i + k, i, dirs[i][k].clone());
            }
        }
        let basis: [V3<T>; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|p| T::from(if p == k { 1.0 } else { 0.0 }))
        });
        let (m, n) = grand_resistance_g(&c, &xc, &basis, self.a, self.fluid.mu, &amat, &shape);
        let cond = condition_number(&m.map_value());
        if !(cond <= self.cond_guard) {
            return Err(Error::SingularSolve { cond });
        }
        let p = m.solve(&n)?.neg();
        let r: V3<T> = [x[7].clone(), x[8].clone(), x[9].clone()];
        let jinv = inv_left_jacobian(&r);
        Ok(std::array::from_fn(|i| {
            let mut out: Vec<T> = (0..4).map(|k| T::from(if k == i { 1.0 } else { 0.0 })).collect();
            for k in 0..3 {
                out.push(p.get(3 + k, i).clone());
            }
            for row in jinv.iter() {
                let mut acc = T::zero();
                for k in 0..3 {
                    acc = acc + row[k].clone() * p.get(k, i).clone();
                }
                out.push(acc);
            }
            out
        }))
    }

    pub fn fields(&self, x: &[f64]) -> Result<[Vec<f64>; 4]> {
        self.validate(x)?;
        let rule = self.wall_rule(x)?;
        self.fields_g(x, &rule)
    }
}
