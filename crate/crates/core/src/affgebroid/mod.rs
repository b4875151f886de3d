//! Lie affgebroids through their bidual algebroid.
//!
//! An [`AffgebroidChart`] holds the structure data in a basis `{e_0, e_α}`
//! adapted to the cocycle `1_A`. From it come the vertical subalgebroid, the
//! prolongation `T^Ã V*`, and for a Hamiltonian section the cosymplectic pair
//! `(Ω_h, η)` with its Reeb section.

mod chart;
mod cosymplectic;
mod identities;
mod sections;

pub use chart::{AffgebroidChart, AffgebroidValidation};
pub use cosymplectic::{
    eta, lambda_h, omega_h, omega_h_by_pullback, reeb, reeb_solve, th_morphism, CosymplecticReport,
    ReebSolution, REEB_SOLVE_TOL,
};
pub use identities::{
    h_of_gamma, pullback_identities, tgamma_morphism, vertical_inclusion, vertical_restriction_check,
    PullbackReport, VerticalReport,
};
pub use sections::{CoSection, HamiltonianSection, VStarSection};
