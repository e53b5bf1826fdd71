//! Command-line front end: argument parsing, configuration, and CSV/JSON output.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 malformed
//! command line, 74 output could not be written.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use roughwall::stroke::FieldsMode;
use thiserror::Error;

pub mod commands;
pub mod config;

use config::{RunConfig, StrokeShape, SwimmerKind, GRID_AXES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] roughwall::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 74,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "roughwall", version, about = "Swimmers near rough walls: kernels, fields, brackets and strokes")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for the JSON configuration; accepted before or after the subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub swimmer: Option<SwimmerKind>,
    /// Sphere radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Viscosity.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Roughness amplitude.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Comma-separated state vector.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub state: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub quad_tol: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub svd_tol: Option<f64>,
    /// Bracket depth for rank computations.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// CSV output path (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON output path.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Mode {
    Asymptotic,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelKind {
    Stokeslet,
    Images,
    Green,
    Dz,
    Rough,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one wall kernel as a 3×3 matrix.
    Kernel {
        #[arg(long, value_enum, default_value = "green")]
        kind: KernelKind,
        /// Field point (for `dz`, its first two components are the wall point).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0,2")]
        r: Vec<f64>,
        /// Source point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0,2")]
        r0: Vec<f64>,
        /// Allow `r = r0` for the rough kernel (images only).
        #[arg(long)]
        self_interaction: bool,
    },
    /// Grand resistance matrices M and N at the configured state.
    Mobility,
    /// Control vector fields at the configured state.
    Fields,
    /// Bracket vectors and the controllability determinant (three spheres).
    Brackets {
        /// Also evaluate [F1, F2] with finite differences.
        #[arg(long)]
        fd_check: bool,
    },
    /// Determinant and rank over a grid of parameters and states.
    DetSweep {
        /// Axis values as `name=v1,v2,...`; names: a, eps, xi1, xi2, theta, phi, x, y, z.
        #[arg(long = "grid", allow_hyphen_values = true)]
        grid: Vec<String>,
        /// Leave the rank column empty.
        #[arg(long)]
        no_rank: bool,
    },
    /// Numerical rank of the bracket family.
    Rank,
    /// Integrate one stroke period.
    Simulate {
        #[arg(long, value_enum)]
        stroke: Option<StrokeShape>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lo: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        hi: Option<Vec<f64>>,
        #[arg(long)]
        period: Option<f64>,
        /// Report the largest |Δy| and |Δφ| along the run.
        #[arg(long)]
        check_planar: bool,
    },
    /// Compare computed far-field coefficients with tabulated values.
    VerifyAppendix {
        #[arg(long, default_value_t = 1e4)]
        z: f64,
    },
}

fn pair(v: &[f64], what: &str) -> Result<[f64; 2], CliError> {
    match v {
        [p, q] => Ok([*p, *q]),
        _ => Err(CliError::Usage(format!("--{what} takes two comma-separated values"))),
    }
}

/// Merges the configuration file and the flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.swimmer {
        cfg.swimmer = s;
    }
    if let Some(a) = c.a {
        cfg.a = a;
    }
    if let Some(mu) = c.mu {
        cfg.mu = mu;
    }
    if let Some(eps) = c.eps {
        cfg.profile = cfg.profile.with_epsilon(eps);
    }
    if let Some(s) = &c.state {
        cfg.state = Some(s.clone());
    }
    if let Some(m) = c.mode {
        cfg.mode = match m {
            Mode::Asymptotic => FieldsMode::Asymptotic,
            Mode::General => FieldsMode::General,
        };
    }
    if let Some(t) = c.quad_tol {
        cfg.quad.tol = t;
    }
    if let Some(t) = c.svd_tol {
        cfg.svd_tol = t;
    }
    if c.depth.is_some() {
        cfg.depth = c.depth;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    if c.json.is_some() {
        cfg.json = c.json.clone();
    }
    match &cli.command {
        Command::DetSweep { grid, .. } => {
            for g in grid {
                let (name, vals) = g
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--grid expects name=values, got {g:?}")))?;
                let parsed: Vec<f64> = vals
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Usage(format!("--grid {name}: {e}")))?;
                let slot = cfg.grid.axis_mut(name).ok_or_else(|| {
                    CliError::Usage(format!("unknown grid axis {name:?}; expected one of {GRID_AXES:?}"))
                })?;
                *slot = Some(parsed);
            }
        }
        Command::Simulate { stroke, lo, hi, period, .. } => {
            if let Some(s) = stroke {
                cfg.stroke.shape = *s;
            }
            if let Some(v) = lo {
                cfg.stroke.lo = pair(v, "lo")?;
            }
            if let Some(v) = hi {
                cfg.stroke.hi = pair(v, "hi")?;
            }
            if let Some(p) = period {
                cfg.stroke.period = *p;
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                eprint!("{text}");
            }
            return code;
        }
    };
    match resolve_config(&cli).and_then(|cfg| commands::dispatch(&cli.command, &cfg, stdout)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
