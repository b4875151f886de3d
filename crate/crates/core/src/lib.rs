// Coordinate formulas index tensors directly, and negated float comparisons
// deliberately treat NaN as failure.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards, clippy::should_implement_trait)]

pub mod affgebroid;
pub mod algebroid;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod hj;
pub mod modelfile;
pub mod models;
pub mod sample;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Alternating section in double precision.
pub type Section = algebroid::KSection<f64>;
/// Integral curve in double precision.
pub type Traj = dynamics::Trajectory<f64>;
/// Single-precision variants.
pub type Section32 = algebroid::KSection<f32>;
pub type Traj32 = dynamics::Trajectory<f32>;
