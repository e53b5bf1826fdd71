//! Lie brackets on Taylor jets and numerical Lie-algebra rank.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::jet::Jet;
use crate::linalg::numerical_rank;
use crate::scalar::Scalar;

/// A family of vector fields on `R^dim` that can be evaluated on any scalar.
pub trait FieldFamily: Sync {
    fn dim(&self) -> usize;
    fn count(&self) -> usize;
    fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<Vec<T>>>;
}

/// `[F, G] = DG·F − DF·G` on jets; the result is exact to one degree less.
pub fn bracket(f: &[Jet], g: &[Jet]) -> Vec<Jet> {
    let n = f.len();
    assert_eq!(n, g.len(), "fields of different dimension");
    let mut out: Vec<Jet> = (0..n).map(|_| Jet::constant(0.0)).collect();
    for j in 0..n {
        let (fj, gj) = (&f[j], &g[j]);
        for i in 0..n {
            let t = g[i].derivative(j) * fj.clone() - f[i].derivative(j) * gj.clone();
            out[i] = std::mem::replace(&mut out[i], Jet::constant(0.0)) + t;
        }
    }
    out
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|j| j.value()).collect()
}

/// A field split into its parts of order 1, `a` and `aε`; absent parts are zero.
#[derive(Clone, Debug, Default)]
pub struct Graded {
    pub parts: [Option<Vec<Jet>>; 3],
}

fn add_opt(a: Option<Vec<Jet>>, b: Option<Vec<Jet>>) -> Option<Vec<Jet>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.into_iter().zip(b).map(|(x, y)| x + y).collect()),
    }
}

fn bracket_opt(f: &Option<Vec<Jet>>, g: &Option<Vec<Jet>>) -> Option<Vec<Jet>> {
    match (f, g) {
        (Some(f), Some(g)) => Some(bracket(f, g)),
        _ => None,
    }
}

impl Graded {
    pub fn new(p0: Vec<Jet>, p1: Option<Vec<Jet>>, p2: Option<Vec<Jet>>) -> Self {
        Graded {
            parts: [Some(p0), p1, p2],
        }
    }

    /// Graded bracket keeping terms with at most one non-zero-order factor:
    /// `[F,G]⁰ = [F⁰,G⁰]`, `[F,G]ᵏ = [Fᵏ,G⁰] + [F⁰,Gᵏ]` for k = 1, 2.
    pub fn bracket(&self, g: &Graded) -> Graded {
        let p0 = bracket_opt(&self.parts[0], &g.parts[0]);
        let mut out = Graded {
            parts: [p0, None, None],
        };
        for k in 1..3 {
            out.parts[k] = add_opt(
                bracket_opt(&self.parts[k], &g.parts[0]),
                bracket_opt(&self.parts[0], &g.parts[k]),
            );
        }
        out
    }

    pub fn part_values(&self, k: usize, dim: usize) -> Vec<f64> {
        match &self.parts[k] {
            Some(v) => values(v),
            None => vec![0.0; dim],
        }
    }
}

/// Right-nested bracket words `[F_{i1}, [F_{i2}, … F_{ik}]]` with up to `depth`
/// brackets, skipping words whose innermost bracket is `[F_i, F_i]`.
pub fn words(count: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0..count).map(|i| vec![i]).collect();
    let mut last = all.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &last {
            for i in 0..count {
                if w.len() == 1 && w[0] == i {
                    continue;
                }
                let mut v = vec![i];
                v.extend(w);
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        last = next;
    }
    all
}

/// Values at `x` of every word up to `depth`, in the order of [`words`].
pub fn word_values<F: FieldFamily>(fam: &F, x: &[f64], depth: usize) -> Result<Vec<(Vec<usize>, Vec<f64>)>> {
    let seeds = Jet::seed(x, depth);
    let fields = fam.eval(&seeds)?;
    let mut out: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    let mut last: Vec<(Vec<usize>, Vec<Jet>)> = Vec::new();
    for (i, f) in fields.iter().enumerate() {
        out.push((vec![i], values(f)));
        last.push((vec![i], f.clone()));
    }
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, jet) in &last {
            for (i, f) in fields.iter().enumerate() {
                if w.len() == 1 && w[0] == i {
                    continue;
                }
                let b = bracket(f, jet);
                let mut word = vec![i];
                word.extend(w);
                out.push((word.clone(), values(&b)));
                next.push((word, b));
            }
        }
        last = next;
    }
    Ok(out)
}

/// Numerical rank of the span of all bracket words up to `depth` at `x`.
pub fn lie_rank<F: FieldFamily>(fam: &F, x: &[f64], depth: usize, svd_tol: f64) -> Result<usize> {
    let vals = word_values(fam, x, depth)?;
    let m = DMatrix::from_fn(fam.dim(), vals.len(), |i, j| vals[j].1[i]);
    Ok(numerical_rank(&m, svd_tol))
}

/// Singular values of the stacked word values, largest first.
pub fn lie_singular_values<F: FieldFamily>(fam: &F, x: &[f64], depth: usize) -> Result<Vec<f64>> {
    let vals = word_values(fam, x, depth)?;
    let m = DMatrix::from_fn(fam.dim(), vals.len(), |i, j| vals[j].1[i]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Infinitesimal rotations of R³: L_k(x) = e_k × x.
    struct Rotations;

    impl FieldFamily for Rotations {
        fn dim(&self) -> usize {
            3
        }
        fn count(&self) -> usize {
            3
        }
        fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
            let z = T::zero;
            Ok(vec![
                vec![z(), -x[2].clone(), x[1].clone()],
                vec![x[2].clone(), z(), -x[0].clone()],
                vec![-x[1].clone(), x[0].clone(), z()],
            ])
        }
    }

    #[test]
    fn rotation_brackets_follow_structure_constants() {
        let x = [0.3, -0.7, 1.1];
        let seeds = Jet::seed(&x, 2);
        let f = Rotations.eval(&seeds).unwrap();
        // [L_1, L_2] = DL_2·L_1 − DL_1·L_2 = −L_3 with this sign convention.
        let b = values(&bracket(&f[0], &f[1]));
        let l3 = values(&f[2]);
        for k in 0..3 {
            assert!((b[k] + l3[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn word_enumeration() {
        let w = words(2, 2);
        assert_eq!(w.len(), 2 + 2 + 4);
        assert!(w.contains(&vec![0, 0, 1]));
    }
}
