//! Gauss–Legendre rules and a tensor-product rule on the unit sphere.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn build(n: usize) -> GaussLegendre {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule of order `n`.
    pub fn get(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::build(n)))
            .clone()
    }

    /// Nodes and weights mapped to [lo, hi].
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + m * x, m * w))
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on the unit sphere: Gauss–Legendre in cos ϑ, uniform in azimuth.
/// Returns `(point, weight)` pairs; weights sum to 4π.
pub fn sphere_rule(n_polar: usize, n_azimuth: usize) -> Vec<([f64; 3], f64)> {
    let gl = GaussLegendre::get(n_polar);
    let dphi = 2.0 * PI / n_azimuth as f64;
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for (&ct, &w) in gl.nodes.iter().zip(&gl.weights) {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for k in 0..n_azimuth {
            let p = (k as f64 + 0.5) * dphi;
            out.push(([st * p.cos(), st * p.sin(), ct], w * dphi));
        }
    }
    out
}
