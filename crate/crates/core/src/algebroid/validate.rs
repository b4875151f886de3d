use std::fmt;
use std::sync::Arc;

use super::{AlgebroidChart, KSection};
use crate::expr::Expr;
use crate::sample::SamplePlan;
use crate::scalar::max_abs;
use crate::Result;

/// Residuals above this bound make a chart invalid.
pub const VALIDITY_TOL: f64 = 1e-8;

/// Outcome of [`validate_chart`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `max |C^c_{ab} + C^c_{ba}|`
    pub antisymmetry: f64,
    /// `max |d(d x^i)|` over coordinate functions; measures the anchor
    /// homomorphism condition.
    pub anchor: f64,
    /// `max |d(d e^a)|` over dual basis sections; measures the Jacobi identity.
    pub jacobi: f64,
    pub points: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        [self.antisymmetry, self.anchor, self.jacobi].iter().all(|&r| r <= VALIDITY_TOL)
    }

    /// Report lines prefixed with `prefix`, one `KEY = value` per metric.
    pub fn lines(&self, prefix: &str) -> String {
        format!(
            "{prefix}antisymmetry = {:.6e}\n{prefix}anchor_residual = {:.6e}\n{prefix}jacobi_residual = {:.6e}\n{prefix}valid = {}\n",
            self.antisymmetry,
            self.anchor,
            self.jacobi,
            self.is_valid()
        )
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lines(""))
    }
}

/// Checks the algebroid axioms at the plan's sample points through `d∘d = 0`
/// on coordinate functions and on dual basis sections.
pub fn validate_chart(chart: &Arc<AlgebroidChart>, plan: &SamplePlan) -> Result<ValidationReport> {
    let r = chart.rank();
    let points = plan.points::<f64, _>(chart.vars());

    let mut antisymmetry: f64 = 0.0;
    for p in &points {
        let c = chart.structure_at(p)?;
        for a in 0..r {
            for b in 0..r {
                for k in 0..r {
                    let s = c[(a * r + b) * r + k] + c[(b * r + a) * r + k];
                    antisymmetry = antisymmetry.max(s.abs());
                }
            }
        }
    }

    let mut anchor: f64 = 0.0;
    if r >= 2 {
        for v in chart.vars() {
            let dd = KSection::<f64>::function(chart.clone(), Expr::var(v))?
                .differential()?
                .differential()?;
            for p in &points {
                anchor = anchor.max(max_abs(dd.values(p)?));
            }
        }
    }

    let mut jacobi: f64 = 0.0;
    if r >= 3 {
        for a in 0..r {
            let dd = KSection::<f64>::basis(chart.clone(), a)?.differential()?.differential()?;
            for p in &points {
                jacobi = jacobi.max(max_abs(dd.values(p)?));
            }
        }
    }

    Ok(ValidationReport { antisymmetry, anchor, jacobi, points: points.len() })
}
