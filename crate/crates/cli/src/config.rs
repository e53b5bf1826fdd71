//! Run configuration: a JSON file (every field optional) overlaid by flags.

use std::path::{Path, PathBuf};

use roughwall::control::FdSpec;
use roughwall::stroke::{stroke_square, FieldsMode, IntegratorSpec, Stroke};
use roughwall::wall::{FluidParams, ProfileKind, QuadSpec, WallProfile};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest number of grid points a sweep accepts.
pub const MAX_GRID: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum SwimmerKind {
    #[serde(rename = "3sphere")]
    #[value(name = "3sphere")]
    ThreeSphere,
    #[serde(rename = "4sphere")]
    #[value(name = "4sphere")]
    FourSphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StrokeShape {
    Square,
    Waypoints,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrokeSpec {
    pub shape: StrokeShape,
    /// Lower-left and upper-right corners of a square stroke.
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Polyline for `waypoints` strokes.
    pub vertices: Vec<[f64; 2]>,
    pub period: f64,
}

impl Default for StrokeSpec {
    fn default() -> Self {
        StrokeSpec {
            shape: StrokeShape::Square,
            lo: [1.0, 1.0],
            hi: [1.3, 1.3],
            vertices: Vec::new(),
            period: 4.0,
        }
    }
}

impl StrokeSpec {
    pub fn build(&self) -> Result<Stroke, CliError> {
        Ok(match self.shape {
            StrokeShape::Square => stroke_square(self.lo, self.hi, self.period)?,
            StrokeShape::Waypoints => Stroke::waypoints(self.vertices.clone(), self.period)?,
        })
    }
}

/// Values per sweep axis; a missing axis takes the value of the base state.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub a: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub xi1: Option<Vec<f64>>,
    pub xi2: Option<Vec<f64>>,
    pub theta: Option<Vec<f64>>,
    pub phi: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
}

pub const GRID_AXES: [&str; 9] = ["a", "eps", "xi1", "xi2", "theta", "phi", "x", "y", "z"];

impl GridSpec {
    pub fn axis_mut(&mut self, name: &str) -> Option<&mut Option<Vec<f64>>> {
        Some(match name {
            "a" => &mut self.a,
            "eps" => &mut self.eps,
            "xi1" => &mut self.xi1,
            "xi2" => &mut self.xi2,
            "theta" => &mut self.theta,
            "phi" => &mut self.phi,
            "x" => &mut self.x,
            "y" => &mut self.y,
            "z" => &mut self.z,
            _ => return None,
        })
    }

    fn axes(&self) -> [&Option<Vec<f64>>; 9] {
        [&self.a, &self.eps, &self.xi1, &self.xi2, &self.theta, &self.phi, &self.x, &self.y, &self.z]
    }

    /// Axis values in [`GRID_AXES`] order, filling gaps from `base`.
    pub fn resolve(&self, base: [f64; 9]) -> [Vec<f64>; 9] {
        let axes = self.axes();
        std::array::from_fn(|k| axes[k].clone().unwrap_or_else(|| vec![base[k]]))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub swimmer: SwimmerKind,
    pub a: f64,
    pub mu: f64,
    pub profile: WallProfile,
    /// Full state: 7 components for the three-sphere swimmer, 10 for the four-sphere one.
    pub state: Option<Vec<f64>>,
    pub grid: GridSpec,
    pub quad: QuadSpec,
    pub fd: FdSpec,
    pub integrator: IntegratorSpec,
    pub stroke: StrokeSpec,
    pub mode: FieldsMode,
    pub svd_tol: f64,
    /// Bracket depth for rank tests; defaults to 3 (three spheres) or 2 (four).
    pub depth: Option<usize>,
    pub out: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

pub const DEFAULT_STATE3: [f64; 7] = [1.2, 0.9, 1.45, 0.0, 0.0, 0.0, 0.8];
pub const DEFAULT_STATE4: [f64; 10] = [1.0, 1.1, 0.9, 1.2, 0.1, -0.2, 3.0, 0.3, -0.2, 0.4];

pub fn default_profile() -> WallProfile {
    WallProfile {
        kind: ProfileKind::TwoBump {
            centers: [[0.5, 0.5], [-0.6, 0.1]],
            widths: [0.5, 0.5],
            amp2: -0.6,
        },
        epsilon: 0.0,
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            swimmer: SwimmerKind::ThreeSphere,
            a: 1e-2,
            mu: 1.0,
            profile: default_profile(),
            state: None,
            grid: GridSpec::default(),
            quad: QuadSpec::default(),
            fd: FdSpec::default(),
            integrator: IntegratorSpec::default(),
            stroke: StrokeSpec::default(),
            mode: FieldsMode::Asymptotic,
            svd_tol: 1e-6,
            depth: None,
            out: None,
            json: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn fluid(&self) -> Result<FluidParams, CliError> {
        Ok(FluidParams::new(self.mu)?)
    }

    pub fn state_len(&self) -> usize {
        match self.swimmer {
            SwimmerKind::ThreeSphere => 7,
            SwimmerKind::FourSphere => 10,
        }
    }

    pub fn state(&self) -> Vec<f64> {
        match (&self.state, self.swimmer) {
            (Some(s), _) => s.clone(),
            (None, SwimmerKind::ThreeSphere) => DEFAULT_STATE3.to_vec(),
            (None, SwimmerKind::FourSphere) => DEFAULT_STATE4.to_vec(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(match self.swimmer {
            SwimmerKind::ThreeSphere => 3,
            SwimmerKind::FourSphere => 2,
        })
    }

    /// Checks everything that does not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(CliError::Config(format!("a must be positive, got {}", self.a)));
        }
        self.fluid()?;
        self.profile.validate()?;
        let n = self.state().len();
        if n != self.state_len() {
            return Err(CliError::Config(format!(
                "state needs {} components for {:?}, got {n}",
                self.state_len(),
                self.swimmer
            )));
        }
        if !(self.svd_tol > 0.0 && self.svd_tol < 1.0) {
            return Err(CliError::Config(format!("svd_tol must lie in (0, 1), got {}", self.svd_tol)));
        }
        if !(self.quad.tol > 0.0) || self.quad.min_order == 0 || self.quad.max_order < self.quad.min_order {
            return Err(CliError::Config("quadrature spec needs tol > 0 and 0 < min_order ≤ max_order".into()));
        }
        if !(self.fd.step_scale > 0.0) {
            return Err(CliError::Config("fd step_scale must be positive".into()));
        }
        let it = &self.integrator;
        if !(it.tol > 0.0) || it.initial_steps == 0 || it.max_steps < it.initial_steps {
            return Err(CliError::Config("integrator needs tol > 0 and 0 < initial_steps ≤ max_steps".into()));
        }
        let cells: usize = self
            .grid
            .axes()
            .iter()
            .map(|a| a.as_ref().map_or(1, |v| v.len()))
            .try_fold(1usize, |acc, n| acc.checked_mul(n))
            .unwrap_or(usize::MAX);
        if cells > MAX_GRID {
            return Err(CliError::Config(format!("grid has {cells} points, more than {MAX_GRID}")));
        }
        if self.grid.axes().iter().any(|a| a.as_ref().is_some_and(|v| v.is_empty())) {
            return Err(CliError::Config("grid axes must not be empty".into()));
        }
        Ok(())
    }
}
