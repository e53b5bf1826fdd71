//! Multivariate truncated Taylor polynomials ("jets").
//!
//! A jet of degree `d` in `n` variables stores all Taylor coefficients of a
//! function up to total degree `d` around a base point. Arithmetic and the
//! elementary functions propagate them exactly (up to rounding), so nested Lie
//! brackets can be formed by differentiating jets instead of nesting finite
//! differences.
//!
//! Differentiation lowers the number of trustworthy degrees by one; every jet
//! carries a `valid` degree and coefficients above it are kept at zero.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use crate::scalar::Scalar;

/// Monomial layout and product tables for a fixed (variables, degree) pair.
#[derive(Debug)]
pub struct JetSpace {
    pub nvars: usize,
    pub degree: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// `deg_end[d]` = number of monomials of total degree ≤ d.
    deg_end: Vec<usize>,
    /// Product triples `(i, j, k)`: mono_i · mono_j = mono_k, sorted by degree of k.
    mul: Vec<(u32, u32, u32)>,
    /// `mul_end[d]` = number of product triples whose output degree is ≤ d.
    mul_end: Vec<usize>,
    /// Per variable: `(src, dst, factor)` for ∂/∂x_v.
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

impl JetSpace {
    fn build(nvars: usize, degree: usize) -> JetSpace {
        let mut exps: Vec<Vec<u8>> = Vec::new();
        let mut deg_end = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            let mut cur = vec![0u8; nvars];
            push_compositions(&mut exps, &mut cur, 0, d);
            deg_end.push(exps.len());
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let deg = |e: &Vec<u8>| e.iter().map(|&x| x as usize).sum::<usize>();

        let mut mul = Vec::new();
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                if deg(ei) + deg(ej) > degree {
                    continue;
                }
                let ek: Vec<u8> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                mul.push((i as u32, j as u32, index[&ek] as u32));
            }
        }
        mul.sort_by_key(|&(_, _, k)| (deg(&exps[k as usize]), k));
        let mut mul_end = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            mul_end.push(
                mul.iter()
                    .take_while(|&&(_, _, k)| deg(&exps[k as usize]) <= d)
                    .count(),
            );
        }

        let mut deriv = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut table = Vec::new();
            for (src, e) in exps.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut f = e.clone();
                f[v] -= 1;
                table.push((src as u32, index[&f] as u32, e[v] as f64));
            }
            deriv.push(table);
        }

        JetSpace {
            nvars,
            degree,
            exps,
            index,
            deg_end,
            mul,
            mul_end,
            deriv,
        }
    }

    /// Shared, lazily built space for `(nvars, degree)`.
    pub fn get(nvars: usize, degree: usize) -> &'static JetSpace {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), &'static JetSpace>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet space cache poisoned");
        *guard
            .entry((nvars, degree))
            .or_insert_with(|| Box::leak(Box::new(JetSpace::build(nvars, degree))))
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent vectors of the monomials, in coefficient order.
    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exps
    }

    pub fn monomial_index(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn push_compositions(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u8;
        push_compositions(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

const CONST_VALID: u8 = u8::MAX;

#[derive(Clone, Debug)]
pub struct Jet {
    c: Vec<f64>,
    space: Option<&'static JetSpace>,
    valid: u8,
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        Jet {
            c: vec![v],
            space: None,
            valid: CONST_VALID,
        }
    }

    /// The coordinate function `x_i` expanded around `value`.
    pub fn variable(space: &'static JetSpace, i: usize, value: f64) -> Jet {
        assert!(i < space.nvars, "variable index out of range");
        let mut c = vec![0.0; space.len()];
        c[0] = value;
        if space.degree >= 1 {
            let mut e = vec![0u8; space.nvars];
            e[i] = 1;
            c[space.index[&e]] = 1.0;
        }
        Jet {
            c,
            space: Some(space),
            valid: space.degree as u8,
        }
    }

    /// Seeds one jet variable per coordinate of `x`.
    pub fn seed(x: &[f64], degree: usize) -> Vec<Jet> {
        let space = JetSpace::get(x.len(), degree);
        x.iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(space, i, v))
            .collect()
    }

    pub fn space(&self) -> Option<&'static JetSpace> {
        self.space
    }

    /// Highest degree whose coefficients are exact.
    pub fn valid_degree(&self) -> usize {
        match self.space {
            None => usize::MAX,
            Some(s) => (self.valid as usize).min(s.degree),
        }
    }

    /// Raw coefficients in the monomial order of [`Jet::space`]; a constant has
    /// only its value.
    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        match self.space {
            None => {
                if exps.iter().all(|&e| e == 0) {
                    self.c[0]
                } else {
                    0.0
                }
            }
            Some(s) => s.monomial_index(exps).map_or(0.0, |i| self.c[i]),
        }
    }

    /// First partial derivative at the base point.
    pub fn partial(&self, var: usize) -> f64 {
        match self.space {
            None => 0.0,
            Some(s) => {
                let mut e = vec![0u8; s.nvars];
                e[var] = 1;
                self.coeff(&e)
            }
        }
    }

    /// ∂/∂x_var as a jet of one lower valid degree.
    pub fn derivative(&self, var: usize) -> Jet {
        let Some(s) = self.space else {
            return Jet::constant(0.0);
        };
        let mut c = vec![0.0; s.len()];
        for &(src, dst, f) in &s.deriv[var] {
            c[dst as usize] += f * self.c[src as usize];
        }
        let valid = self.valid.saturating_sub(1);
        let mut out = Jet {
            c,
            space: Some(s),
            valid,
        };
        out.clear_above_valid();
        out
    }

    fn clear_above_valid(&mut self) {
        if let Some(s) = self.space {
            let v = self.valid as usize;
            if v < s.degree {
                for x in &mut self.c[s.deg_end[v]..] {
                    *x = 0.0;
                }
            }
        }
    }

    fn promote(&self, space: &'static JetSpace) -> Jet {
        match self.space {
            Some(_) => self.clone(),
            None => {
                let mut c = vec![0.0; space.len()];
                c[0] = self.c[0];
                Jet {
                    c,
                    space: Some(space),
                    valid: space.degree as u8,
                }
            }
        }
    }

    fn common(a: &Jet, b: &Jet) -> Option<&'static JetSpace> {
        match (a.space, b.space) {
            (None, None) => None,
            (Some(s), None) | (None, Some(s)) => Some(s),
            (Some(s), Some(t)) => {
                assert!(std::ptr::eq(s, t), "jets from different spaces");
                Some(s)
            }
        }
    }

    fn add_ref(&self, o: &Jet, sign: f64) -> Jet {
        match Jet::common(self, o) {
            None => Jet::constant(self.c[0] + sign * o.c[0]),
            Some(s) => {
                let mut out = self.promote(s);
                match o.space {
                    None => out.c[0] += sign * o.c[0],
                    Some(_) => {
                        for (x, y) in out.c.iter_mut().zip(&o.c) {
                            *x += sign * y;
                        }
                    }
                }
                out.valid = self.valid.min(o.valid);
                out.clear_above_valid();
                out
            }
        }
    }

    fn scale(&self, k: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|x| x * k).collect(),
            space: self.space,
            valid: self.valid,
        }
    }

    fn mul_ref(&self, o: &Jet) -> Jet {
        if o.space.is_none() {
            return self.scale(o.c[0]);
        }
        if self.space.is_none() {
            return o.scale(self.c[0]);
        }
        let s = Jet::common(self, o).expect("non-constant jets");
        let valid = self.valid.min(o.valid);
        let top = (valid as usize).min(s.degree);
        let mut c = vec![0.0; s.len()];
        for &(i, j, k) in &s.mul[..s.mul_end[top]] {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet {
            c,
            space: Some(s),
            valid,
        }
    }

    /// Σ_k coef[k]·(self − self₀)^k, i.e. composition with a univariate series
    /// whose Taylor coefficients around the base value are `coef`.
    fn compose(&self, coef: &[f64]) -> Jet {
        let Some(s) = self.space else {
            return Jet::constant(coef[0]);
        };
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        let d = coef.len() - 1;
        let mut r = Jet::constant(coef[d]).promote(s);
        r.valid = self.valid;
        for k in (0..d).rev() {
            r = r.mul_ref(&delta);
            r.c[0] += coef[k];
        }
        r
    }

    fn order(&self) -> usize {
        match self.space {
            None => 0,
            Some(s) => (self.valid as usize).min(s.degree),
        }
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Jet {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        self.add_ref(&o, 1.0)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self.add_ref(&o, -1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        self.mul_ref(&o)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        if o.space.is_none() {
            return self.scale(1.0 / o.c[0]);
        }
        self.mul_ref(&o.recip())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.c[0] += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.c[0] -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        self.scale(o)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        self.scale(1.0 / o)
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }

    fn taylor_degree(&self) -> usize {
        self.order()
    }

    fn recip(&self) -> Jet {
        let a = self.c[0];
        let d = self.order();
        let mut coef = Vec::with_capacity(d + 1);
        let mut p = 1.0 / a;
        for _ in 0..=d {
            coef.push(p);
            p *= -1.0 / a;
        }
        self.compose(&coef)
    }

    fn sqrt(&self) -> Jet {
        let a = self.c[0];
        let d = self.order();
        // binom(1/2, k)·a^(1/2 − k)
        let mut coef = Vec::with_capacity(d + 1);
        let mut b = 1.0;
        let mut p = a.sqrt();
        for k in 0..=d {
            coef.push(b * p);
            b *= (0.5 - k as f64) / (k as f64 + 1.0);
            p /= a;
        }
        self.compose(&coef)
    }

    fn sin(&self) -> Jet {
        let (s, c) = self.c[0].sin_cos();
        let cycle = [s, c, -s, -c];
        self.compose(&trig_coef(&cycle, self.order()))
    }

    fn cos(&self) -> Jet {
        let (s, c) = self.c[0].sin_cos();
        let cycle = [c, -s, -c, s];
        self.compose(&trig_coef(&cycle, self.order()))
    }
}

fn trig_coef(cycle: &[f64; 4], d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(d + 1);
    let mut fact = 1.0;
    for k in 0..=d {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(cycle[k % 4] / fact);
    }
    out
}
