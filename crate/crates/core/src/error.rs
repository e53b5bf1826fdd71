use thiserror::Error;

/// Constraint broken by a swimmer state or sphere cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Violation {
    ArmTooShort,
    AngleDegenerate,
    WallClearance,
    Overlap,
    ChartRange,
    NonFinite,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Violation::ArmTooShort => "arm too short",
            Violation::AngleDegenerate => "axis angle degenerate",
            Violation::WallClearance => "insufficient wall clearance",
            Violation::Overlap => "spheres overlap",
            Violation::ChartRange => "rotation chart out of range",
            Violation::NonFinite => "non-finite state component",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("points coincide (separation {0:e})")]
    ZeroSeparation(f64),
    #[error("field point coincides with the image point (separation {0:e})")]
    ImagePointCoincidence(f64),
    #[error("quadrature did not converge: relative change {change:e} at order {order}")]
    QuadratureNotConverged { order: usize, change: f64 },
    #[error("invalid sphere cluster: {0}")]
    ClusterInvalid(Violation),
    #[error("inadmissible state: {0}")]
    StateInvalid(Violation),
    #[error("singular solve (condition number {cond:e})")]
    SingularSolve { cond: f64 },
    #[error("step halving did not converge: change {change:e} with {steps} steps per leg")]
    IntegrationNotConverged { steps: usize, change: f64 },
    #[error("finite-difference stencil leaves the admissible set")]
    StepTooLarge,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for failures caused by bad inputs rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ClusterInvalid(_)
                | Error::StateInvalid(_)
                | Error::InvalidParameter(_)
                | Error::StepTooLarge
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
