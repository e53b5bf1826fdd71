//! Shape strokes and their integration along the three-sphere dynamics.
//!
//! Arm lengths are controls: at every Runge–Kutta stage they are read off the
//! stroke, and only the five pose coordinates are integrated.

use serde::{Deserialize, Serialize};

use crate::dynamics::Swimmer3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeKind {
    Square,
    Reversed,
    Waypoints,
}

/// A polyline in the `(ξ₁, ξ₂)` plane. Every leg takes the same time and is
/// traversed at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub vertices: Vec<[f64; 2]>,
    pub period: f64,
    pub kind: StrokeKind,
}

impl Stroke {
    pub fn waypoints(vertices: Vec<[f64; 2]>, period: f64) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameter("a stroke needs at least two vertices".into()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite stroke vertex".into()));
        }
        Ok(Stroke {
            vertices,
            period,
            kind: StrokeKind::Waypoints,
        })
    }

    pub fn legs(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn leg_duration(&self) -> f64 {
        self.period / self.legs() as f64
    }

    fn leg_at(&self, t: f64) -> (usize, f64) {
        let d = self.leg_duration();
        let k = ((t / d).floor().max(0.0) as usize).min(self.legs() - 1);
        (k, t - k as f64 * d)
    }

    /// Shape on leg `k` at local time `tau`.
    pub fn leg_position(&self, k: usize, tau: f64) -> [f64; 2] {
        let r = self.leg_rate(k);
        let p = self.vertices[k];
        [p[0] + r[0] * tau, p[1] + r[1] * tau]
    }

    pub fn leg_rate(&self, k: usize) -> [f64; 2] {
        let (p, q) = (self.vertices[k], self.vertices[k + 1]);
        let d = self.leg_duration();
        [(q[0] - p[0]) / d, (q[1] - p[1]) / d]
    }

    pub fn position(&self, t: f64) -> [f64; 2] {
        if t >= self.period {
            return *self.vertices.last().unwrap();
        }
        let (k, tau) = self.leg_at(t);
        self.leg_position(k, tau)
    }

    /// Right-continuous shape rate.
    pub fn rate(&self, t: f64) -> [f64; 2] {
        self.leg_rate(self.leg_at(t).0)
    }

    /// The same path traversed backwards in time.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Stroke {
            vertices,
            period: self.period,
            kind: StrokeKind::Reversed,
        }
    }

    /// Shoelace area of the polygon closed by its first vertex.
    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            acc += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * acc
    }
}

/// Rectangle `lo → (hi₁, lo₂) → hi → (lo₁, hi₂) → lo`: ξ₁ extends, ξ₂ extends,
/// ξ₁ retracts, ξ₂ retracts.
pub fn stroke_square(lo: [f64; 2], hi: [f64; 2], period: f64) -> Result<Stroke> {
    if !(lo[0] > 0.0 && lo[1] > 0.0 && lo[0] < hi[0] && lo[1] < hi[1]) {
        return Err(Error::InvalidParameter(format!(
            "square stroke needs 0 < lo < hi componentwise, got {lo:?}, {hi:?}"
        )));
    }
    let mut s = Stroke::waypoints(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]], lo], period)?;
    s.kind = StrokeKind::Square;
    Ok(s)
}

/// Which force fields drive the pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldsMode {
    /// Unsplit solve of the reduced five-equation balance.
    Asymptotic,
    /// Full 6×6 grand-resistance solve.
    General,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntegratorSpec {
    /// Halving stops once no component of the final state moves by more than
    /// `tol · max(1, |value|)`.
    pub tol: f64,
    pub initial_steps: usize,
    pub max_steps: usize,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            tol: 1e-10,
            initial_steps: 8,
            max_steps: 4096,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegratorStats {
    pub steps_per_leg: usize,
    pub halvings: usize,
    pub field_evaluations: usize,
    /// Largest scaled change of the final state at the last halving.
    pub final_change: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub mode: FieldsMode,
    pub times: Vec<f64>,
    /// `(ξ₁, ξ₂, θ, φ, x, y, z)` at each time.
    pub states: Vec<[f64; 7]>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn final_state(&self) -> [f64; 7] {
        *self.states.last().unwrap()
    }

    /// `max_t |X_k(t) − X_k(0)|`.
    pub fn max_deviation(&self, k: usize) -> f64 {
        let x0 = self.states[0][k];
        self.states.iter().map(|s| (s[k] - x0).abs()).fold(0.0, f64::max)
    }
}

fn pose_rate(sw: &Swimmer3, mode: FieldsMode, xi: [f64; 2], pose: &[f64; 5], rate: [f64; 2]) -> Result<[f64; 5]> {
    if rate == [0.0, 0.0] {
        return Ok([0.0; 5]);
    }
    let x = [xi[0], xi[1], pose[0], pose[1], pose[2], pose[3], pose[4]];
    let f = match mode {
        FieldsMode::Asymptotic => sw.split_fields(&x)?.total,
        FieldsMode::General => sw.general_fields(&x)?,
    };
    Ok(std::array::from_fn(|k| f[0][2 + k] * rate[0] + f[1][2 + k] * rate[1]))
}

fn axpy(y: &[f64; 5], h: f64, k: &[f64; 5]) -> [f64; 5] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn run(sw: &Swimmer3, x0: &[f64; 7], stroke: &Stroke, mode: FieldsMode, n: usize) -> Result<(Vec<f64>, Vec<[f64; 7]>, usize)> {
    let h = stroke.leg_duration() / n as f64;
    let mut pose: [f64; 5] = std::array::from_fn(|k| x0[2 + k]);
    let mut times = vec![0.0];
    let mut states = vec![*x0];
    let mut evals = 0;
    for leg in 0..stroke.legs() {
        let rate = stroke.leg_rate(leg);
        let t_leg = leg as f64 * stroke.leg_duration();
        let f = |tau: f64, y: &[f64; 5]| pose_rate(sw, mode, stroke.leg_position(leg, tau), y, rate);
        for step in 0..n {
            let tau = step as f64 * h;
            let k1 = f(tau, &pose)?;
            let k2 = f(tau + 0.5 * h, &axpy(&pose, 0.5 * h, &k1))?;
            let k3 = f(tau + 0.5 * h, &axpy(&pose, 0.5 * h, &k2))?;
            let k4 = f(tau + h, &axpy(&pose, h, &k3))?;
            evals += 4;
            pose = std::array::from_fn(|i| pose[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            let tau1 = (step + 1) as f64 * h;
            let xi = stroke.leg_position(leg, tau1);
            let x = [xi[0], xi[1], pose[0], pose[1], pose[2], pose[3], pose[4]];
            sw.validate(&x)?;
            times.push(t_leg + tau1);
            states.push(x);
        }
    }
    Ok((times, states, evals))
}

/// Integrates `Ẋ = F₁(X)ξ̇₁ + F₂(X)ξ̇₂` along `stroke` with classical RK4,
/// halving the step until the final state settles to `spec.tol`.
///
/// The arm lengths of `state0` must equal the stroke's starting point.
pub fn integrate_stroke(
    sw: &Swimmer3,
    state0: [f64; 7],
    stroke: &Stroke,
    mode: FieldsMode,
    spec: &IntegratorSpec,
) -> Result<Trajectory> {
    let start = stroke.vertices[0];
    if (state0[0] - start[0]).abs() > 1e-12 * start[0].abs().max(1.0)
        || (state0[1] - start[1]).abs() > 1e-12 * start[1].abs().max(1.0)
    {
        return Err(Error::InvalidParameter(format!(
            "initial arm lengths ({}, {}) differ from the stroke start {start:?}",
            state0[0], state0[1]
        )));
    }
    sw.validate(&state0)?;
    let mut n = spec.initial_steps.max(1);
    let (mut times, mut states, mut evals);
    (_, states, evals) = run(sw, &state0, stroke, mode, n)?;
    let mut halvings = 0;
    let mut last_change = f64::NAN;
    while 2 * n <= spec.max_steps {
        let (t2, s2, e2) = run(sw, &state0, stroke, mode, 2 * n)?;
        evals += e2;
        halvings += 1;
        n *= 2;
        let change = states
            .last()
            .unwrap()
            .iter()
            .zip(s2.last().unwrap())
            .map(|(p, q)| (p - q).abs() / q.abs().max(1.0))
            .fold(0.0, f64::max);
        times = t2;
        states = s2;
        if change < spec.tol {
            return Ok(Trajectory {
                mode,
                times,
                states,
                stats: IntegratorStats {
                    steps_per_leg: n,
                    halvings,
                    field_evaluations: evals,
                    final_change: change,
                },
            });
        }
        last_change = change;
    }
    Err(Error::IntegrationNotConverged {
        steps: n,
        change: last_change,
    })
}
