//! Lie algebroids in a single chart.
//!
//! An [`AlgebroidChart`] carries the anchor and structure functions, a
//! [`KSection`] an alternating section of degree at most 3. The differential
//! `d^E` is implemented from the invariant formula evaluated on basis
//! sections, and [`validate_chart`] checks the algebroid axioms numerically
//! through `d∘d = 0`.

mod canonical;
mod chart;
mod morphism;
mod section;
mod validate;

pub use canonical::{canonical_symplectic, liouville};
pub use chart::AlgebroidChart;
pub use morphism::{pullback, Morphism};
pub use section::{index_sets, sort_signed, CoeffFn, KSection, FD_STEP, MAX_DEGREE};
pub use validate::{validate_chart, ValidationReport, VALIDITY_TOL};
