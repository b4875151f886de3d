//! Liouville and canonical symplectic sections on `T^E E*`.

use std::sync::Arc;

use super::{AlgebroidChart, KSection};
use crate::expr::{self, Expr};
use crate::{Error, Real, Result};

fn check(base: &AlgebroidChart, fiber_vars: &[String]) -> Result<()> {
    if fiber_vars.len() != base.rank() {
        return Err(Error::Dimension(format!(
            "dual bundle of a rank-{} algebroid needs {} fiber coordinates",
            base.rank(),
            base.rank()
        )));
    }
    Ok(())
}

/// `λ_E = y_a ẽ^a` on `prolong = base.prolongation(fiber_vars)`.
pub fn liouville<T: Real>(
    base: &AlgebroidChart,
    prolong: Arc<AlgebroidChart>,
    fiber_vars: &[String],
) -> Result<KSection<T>> {
    check(base, fiber_vars)?;
    let entries = fiber_vars.iter().enumerate().map(|(a, y)| (vec![a], Expr::var(y))).collect();
    KSection::from_exprs(prolong, 1, entries)
}

/// `Ω_E = ẽ^a ∧ ē^a + ½ C^c_{ab} y_c ẽ^a ∧ ẽ^b` on the same chart.
pub fn canonical_symplectic<T: Real>(
    base: &AlgebroidChart,
    prolong: Arc<AlgebroidChart>,
    fiber_vars: &[String],
) -> Result<KSection<T>> {
    check(base, fiber_vars)?;
    let r = base.rank();
    let mut entries = Vec::new();
    for a in 0..r {
        entries.push((vec![a, r + a], Expr::num(1.0)));
        for b in a + 1..r {
            let coeff = expr::sum(
                (0..r).map(|c| expr::mul(base.structure_expr(a, b, c).clone(), Expr::var(&fiber_vars[c]))),
            );
            if !coeff.is_zero_literal() {
                entries.push((vec![a, b], coeff));
            }
        }
    }
    KSection::from_exprs(prolong, 2, entries)
}
