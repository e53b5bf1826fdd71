//! Wall-bounded Stokes kernels, sphere-cluster mobility, three- and four-sphere
//! swimmer dynamics and Lie-bracket controllability tools.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod jet;
mod jet3;
pub mod linalg;
pub mod quadrature;
pub mod mobility;
pub mod scalar;
pub mod stroke;
pub mod swimmer;
pub mod wall;

pub use error::{Error, Result, Violation};
