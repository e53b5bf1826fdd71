//! Fixed-size cubic jets in three variables, for the wall-quadrature inner loop
//! where heap-allocated [`Jet`](crate::jet::Jet)s dominate the cost.
//!
//! Coefficients use the monomial order of `JetSpace::get(3, 3)`.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::jet::JetSpace;
use crate::scalar::Scalar;

pub(crate) const LEN: usize = 20;

fn table() -> &'static [(u8, u8, u8)] {
    static T: OnceLock<Vec<(u8, u8, u8)>> = OnceLock::new();
    T.get_or_init(|| {
        let s = JetSpace::get(3, 3);
        let e = s.exponents();
        let mut out = Vec::new();
        for (i, a) in e.iter().enumerate() {
            for (j, b) in e.iter().enumerate() {
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(k) = s.monomial_index(&sum) {
                    out.push((i as u8, j as u8, k as u8));
                }
            }
        }
        out
    })
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Jet3(pub [f64; LEN]);

impl Jet3 {
    /// The three coordinate functions expanded around `x`.
    pub fn seed(x: &[f64; 3]) -> [Jet3; 3] {
        let s = JetSpace::get(3, 3);
        std::array::from_fn(|v| {
            let mut c = [0.0; LEN];
            c[0] = x[v];
            let mut e = [0u8; 3];
            e[v] = 1;
            c[s.monomial_index(&e).expect("linear monomial")] = 1.0;
            Jet3(c)
        })
    }

    fn compose(&self, coef: [f64; 4]) -> Jet3 {
        let mut d = *self;
        d.0[0] = 0.0;
        let mut r = Jet3::from(coef[3]);
        for k in (0..3).rev() {
            r = r * d;
            r.0[0] += coef[k];
        }
        r
    }
}

impl From<f64> for Jet3 {
    fn from(v: f64) -> Jet3 {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet3(c)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(mut self, o: Jet3) -> Jet3 {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(mut self, o: Jet3) -> Jet3 {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        let mut c = [0.0; LEN];
        for &(i, j, k) in table() {
            c[k as usize] += self.0[i as usize] * o.0[j as usize];
        }
        Jet3(c)
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self * -1.0
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(mut self, o: f64) -> Jet3 {
        self.0[0] += o;
        self
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    fn sub(mut self, o: f64) -> Jet3 {
        self.0[0] -= o;
        self
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(mut self, o: f64) -> Jet3 {
        for a in &mut self.0 {
            *a *= o;
        }
        self
    }
}

impl Div<f64> for Jet3 {
    type Output = Jet3;
    fn div(self, o: f64) -> Jet3 {
        self * (1.0 / o)
    }
}

impl Scalar for Jet3 {
    fn value(&self) -> f64 {
        self.0[0]
    }

    fn taylor_degree(&self) -> usize {
        3
    }

    fn recip(&self) -> Jet3 {
        let a = 1.0 / self.0[0];
        self.compose([a, -a * a, a * a * a, -a * a * a * a])
    }

    fn sqrt(&self) -> Jet3 {
        let a = self.0[0];
        let r = a.sqrt();
        self.compose([r, 0.5 * r / a, -0.125 * r / (a * a), 0.0625 * r / (a * a * a)])
    }

    fn sin(&self) -> Jet3 {
        let (s, c) = self.0[0].sin_cos();
        self.compose([s, c, -s / 2.0, -c / 6.0])
    }

    fn cos(&self) -> Jet3 {
        let (s, c) = self.0[0].sin_cos();
        self.compose([c, -s, -c / 2.0, s / 6.0])
    }
}
