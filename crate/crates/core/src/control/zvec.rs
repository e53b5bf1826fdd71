//! The five bracket vectors of the three-sphere swimmer, the controllability
//! determinant and its roughness-integrand decomposition.

use rayon::prelude::*;
use serde::Serialize;

use crate::control::bracket::{bracket, values, FieldFamily, Graded};
use crate::dynamics::{Swimmer3, Swimmer4};
use crate::error::Result;
use crate::jet::Jet;
use crate::linalg::Mat;
use crate::mobility::WallRule;
use crate::scalar::Scalar;

/// Bracket words entering the determinant, as (outer letters, innermost pair):
/// [F₁,F₂], [F₁,[F₁,F₂]], [F₂,[F₁,F₂]], [F₁,[F₁,[F₁,F₂]]], [F₂,[F₂,[F₁,F₂]]].
pub const Z_WORDS: [&str; 5] = ["[F1,F2]", "[F1,[F1,F2]]", "[F2,[F1,F2]]", "[F1,[F1,[F1,F2]]]", "[F2,[F2,[F1,F2]]]"];

/// Jet degree needed for the deepest word.
const DEPTH: usize = 3;

/// Evaluates the five words from two fields with a generic bracket.
fn five<B: Clone>(f1: &B, f2: &B, br: impl Fn(&B, &B) -> B) -> [B; 5] {
    let w1 = br(f1, f2);
    let w2 = br(f1, &w1);
    let w3 = br(f2, &w1);
    let w4 = br(f1, &w2);
    let w5 = br(f2, &w3);
    [w1, w2, w3, w4, w5]
}

fn tail5(v: &[f64]) -> [f64; 5] {
    std::array::from_fn(|k| v[2 + k])
}

/// Components 3..7 of the five words, by order, plus the unsplit version.
#[derive(Debug, Clone, Serialize)]
pub struct ZSet {
    pub z0: [[f64; 5]; 5],
    pub z1: [[f64; 5]; 5],
    pub z2: [[f64; 5]; 5],
    pub total: [[f64; 5]; 5],
    /// Full 7-component values of `F₁, F₂` and the five words (unsplit).
    pub columns7: [[f64; 7]; 7],
}

impl Swimmer3 {
    fn graded_fields(&self, x: &[f64], rule: &WallRule) -> Result<([Graded; 2], [Vec<Jet>; 2])> {
        let seeds = Jet::seed(x, DEPTH);
        let f = self.split_fields_g(&seeds, rule)?;
        let [f0a, f0b] = f.f0;
        let [f1a, f1b] = f.f1;
        let [f2a, f2b] = f.f2;
        Ok((
            [
                Graded::new(f0a, Some(f1a), Some(f2a)),
                Graded::new(f0b, Some(f1b), Some(f2b)),
            ],
            f.total,
        ))
    }

    /// Order-split and total bracket vectors at `x`.
    pub fn z_vectors(&self, x: &[f64]) -> Result<ZSet> {
        self.validate(x)?;
        let rule = self.wall_rule(x)?;
        self.z_vectors_with_rule(x, &rule)
    }

    pub fn z_vectors_with_rule(&self, x: &[f64], rule: &WallRule) -> Result<ZSet> {
        let (g, total) = self.graded_fields(x, rule)?;
        let gw = five(&g[0], &g[1], |a, b| a.bracket(b));
        let tw = five(&total[0], &total[1], |a, b| bracket(a, b));
        let part = |k: usize| -> [[f64; 5]; 5] { std::array::from_fn(|i| tail5(&gw[i].part_values(k, 7))) };
        let mut columns7 = [[0.0; 7]; 7];
        for (c, v) in columns7.iter_mut().zip(
            total
                .iter()
                .map(|f| values(f))
                .chain(tw.iter().map(|w| values(w))),
        ) {
            c.copy_from_slice(&v);
        }
        Ok(ZSet {
            z0: part(0),
            z1: part(1),
            z2: part(2),
            total: std::array::from_fn(|i| tail5(&values(&tw[i]))),
            columns7,
        })
    }

    /// Order-`aε` bracket vectors with the wall integral replaced by the integrand
    /// at each of the wall points `s`.
    pub fn z2_int(&self, x: &[f64], points: &[[f64; 2]]) -> Result<Vec<[[f64; 5]; 5]>> {
        self.validate(x)?;
        let seeds = Jet::seed(x, DEPTH);
        let base = self.split_fields_g(&seeds, &WallRule::flat())?;
        let [f0a, f0b] = base.f0;
        points
            .par_iter()
            .map(|&s| {
                let [ia, ib] = self.f2_int_g(&seeds, s)?;
                let g1 = Graded::new(f0a.clone(), None, Some(ia));
                let g2 = Graded::new(f0b.clone(), None, Some(ib));
                let w = five(&g1, &g2, |a, b| a.bracket(b));
                Ok(std::array::from_fn(|i| tail5(&w[i].part_values(2, 7))))
            })
            .collect()
    }

    /// `det |F₁, F₂, [F₁,F₂], …|` from the unsplit fields (5×5 reduction).
    pub fn det7(&self, x: &[f64]) -> Result<f64> {
        Ok(det_columns(&self.z_vectors(x)?.total))
    }

    /// `det7` together with its rounding floor (see [`det_noise_floor`]).
    pub fn det7_with_floor(&self, x: &[f64]) -> Result<(f64, f64)> {
        let z = self.z_vectors(x)?;
        Ok((det_columns(&z.total), det_noise_floor(&z.total)))
    }

    /// `Σ_{p<q} det(columns: Z²(s) at p, Z²(t) at q, Z¹ elsewhere)`.
    pub fn det_int(&self, x: &[f64], s: [f64; 2], t: [f64; 2]) -> Result<f64> {
        let z1 = self.z_vectors_with_rule(x, &WallRule::flat())?.z1;
        let zi = self.z2_int(x, &[s, t])?;
        Ok(det_int_from(&z1, &zi[0], &zi[1]))
    }

    /// `−ε² ∫∫ h(s) h(t) det_int(X, s, t) ds dt` on the converged wall rule.
    ///
    /// `det_int` is linear in each of its two integrand columns, so the product
    /// rule collapses onto the single integral `∫ h Z²_int`.
    pub fn script_a(&self, x: &[f64]) -> Result<f64> {
        self.validate(x)?;
        let eps = self.profile.epsilon;
        if eps == 0.0 {
            return Ok(0.0);
        }
        let rule = self.wall_rule(x)?;
        let unit = WallRule {
            nodes: rule.nodes.clone(),
            epsilon: 1.0,
            order: rule.order,
        };
        let z = self.z_vectors_with_rule(x, &unit)?;
        // with ε = 1 the order-2 part equals −∫ h Z²_int
        let agg: [[f64; 5]; 5] = std::array::from_fn(|i| std::array::from_fn(|k| -z.z2[i][k]));
        Ok(-eps * eps * det_int_from(&z.z1, &agg, &agg))
    }

    /// Same double integral evaluated node-by-node (for checking the collapse).
    pub fn script_a_double_sum(&self, x: &[f64], order: usize) -> Result<f64> {
        self.validate(x)?;
        let eps = self.profile.epsilon;
        let nodes = self.profile.weighted_nodes(order);
        let pts: Vec<[f64; 2]> = nodes.iter().map(|n| n.0).collect();
        let z1 = self.z_vectors_with_rule(x, &WallRule::flat())?.z1;
        let zi = self.z2_int(x, &pts)?;
        let mut acc = 0.0;
        for (p, zs) in nodes.iter().zip(&zi) {
            for (q, zt) in nodes.iter().zip(&zi) {
                acc += p.1 * q.1 * det_int_from(&z1, zs, zt);
            }
        }
        Ok(-eps * eps * acc)
    }
}

/// Determinant of five 5-vectors taken as columns.
pub fn det_columns(cols: &[[f64; 5]; 5]) -> f64 {
    let mut m = Mat::<f64>::zeros(5, 5);
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            m.set(i, j, *v);
        }
    }
    m.det()
}

/// Rounding floor of a 5×5 determinant: the Hadamard bound `Π‖column‖`
/// times `64·u`. Values below it carry no sign or magnitude information.
pub fn det_noise_floor(cols: &[[f64; 5]; 5]) -> f64 {
    let hadamard: f64 = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).product();
    64.0 * f64::EPSILON * hadamard
}

/// Determinant of seven 7-vectors taken as columns.
pub fn det_columns7(cols: &[[f64; 7]; 7]) -> f64 {
    let mut m = Mat::<f64>::zeros(7, 7);
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            m.set(i, j, *v);
        }
    }
    m.det()
}

pub fn det_int_from(z1: &[[f64; 5]; 5], zs: &[[f64; 5]; 5], zt: &[[f64; 5]; 5]) -> f64 {
    let mut acc = 0.0;
    for p in 0..5 {
        for q in p + 1..5 {
            let mut cols = *z1;
            cols[p] = zs[p];
            cols[q] = zt[q];
            acc += det_columns(&cols);
        }
    }
    acc
}

/// Unsplit three-sphere fields on a fixed wall rule, as a bracket-generating family.
pub struct TotalFields3<'a> {
    pub swimmer: &'a Swimmer3,
    pub rule: WallRule,
}

impl<'a> TotalFields3<'a> {
    pub fn at(swimmer: &'a Swimmer3, x: &[f64]) -> Result<Self> {
        swimmer.validate(x)?;
        Ok(TotalFields3 {
            swimmer,
            rule: swimmer.wall_rule(x)?,
        })
    }
}

impl FieldFamily for TotalFields3<'_> {
    fn dim(&self) -> usize {
        7
    }
    fn count(&self) -> usize {
        2
    }
    fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        Ok(self.swimmer.split_fields_g(x, &self.rule)?.total.to_vec())
    }
}

/// Three-sphere fields from the 6×6 resistance solve.
pub struct GeneralFields3<'a> {
    pub swimmer: &'a Swimmer3,
    pub rule: WallRule,
}

impl<'a> GeneralFields3<'a> {
    pub fn at(swimmer: &'a Swimmer3, x: &[f64]) -> Result<Self> {
        swimmer.validate(x)?;
        Ok(GeneralFields3 {
            swimmer,
            rule: swimmer.wall_rule(x)?,
        })
    }
}

impl FieldFamily for GeneralFields3<'_> {
    fn dim(&self) -> usize {
        7
    }
    fn count(&self) -> usize {
        2
    }
    fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        Ok(self.swimmer.general_fields_g(x, &self.rule)?.0.to_vec())
    }
}

/// Four-sphere fields on a fixed wall rule.
pub struct Fields4<'a> {
    pub swimmer: &'a Swimmer4,
    pub rule: WallRule,
}

impl<'a> Fields4<'a> {
    pub fn at(swimmer: &'a Swimmer4, x: &[f64]) -> Result<Self> {
        swimmer.validate(x)?;
        Ok(Fields4 {
            swimmer,
            rule: swimmer.wall_rule(x)?,
        })
    }
}

impl FieldFamily for Fields4<'_> {
    fn dim(&self) -> usize {
        10
    }
    fn count(&self) -> usize {
        4
    }
    fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        Ok(self.swimmer.fields_g(x, &self.rule)?.to_vec())
    }
}
