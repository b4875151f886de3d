use std::fmt;

use super::{eta, lambda_h, omega_h, HamiltonianSection, VStarSection};
use crate::algebroid::{canonical_symplectic, liouville, KSection, Morphism};
use crate::expr::{self, Expr};
use crate::sample::SamplePlan;
use crate::{Error, Result};

/// `(Tγ, γ)`: from `Ã` over `x` to `T^Ã V*` over `(x, y)`, with base map
/// `x ↦ (x, γ(x))` and `e_a ↦ ẽ_a + ρ^i_a ∂γ_ν/∂x^i ē_ν`.
pub fn tgamma_morphism(gamma: &VStarSection) -> Result<Morphism> {
    let chart = gamma.chart();
    let n = chart.affine_rank();
    let bidual = chart.bidual_chart();
    let mut base: Vec<Expr> = chart.vars().iter().map(|v| Expr::var(v)).collect();
    base.extend(gamma.components().iter().cloned());
    let mut fiber = vec![vec![Expr::num(0.0); n + 1]; 2 * n + 1];
    for a in 0..=n {
        fiber[a][a] = Expr::num(1.0);
        for (nu, g) in gamma.components().iter().enumerate() {
            fiber[n + 1 + nu][a] = expr::sum(
                chart
                    .vars()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| expr::mul(bidual.anchor_expr(a, i).clone(), g.partial(v))),
            );
        }
    }
    Morphism::new(bidual, chart.prolongation_chart(), base, fiber)
}

/// `h∘γ` as a 1-section of `Ã`: components `(−H(x, γ(x)), γ_α(x))`.
pub fn h_of_gamma(h: &HamiltonianSection, gamma: &VStarSection) -> Result<KSection<f64>> {
    let coeffs = std::iter::once(expr::negate(h.composed(gamma.components())))
        .chain(gamma.components().iter().cloned())
        .collect();
    KSection::one_form(h.chart().bidual_chart(), coeffs)
}

/// Deviations in the pullback identities for a section `γ` of `V*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackReport {
    /// `max |(Tγ, γ)^* λ_h − h∘γ|`
    pub lambda: f64,
    /// `max |(Tγ, γ)^* Ω_h + d^Ã(h∘γ)|`
    pub omega: f64,
    /// `max |d (Tγ, γ)^* φ − (Tγ, γ)^* d φ|` over coordinate functions and the dual basis
    pub morphism: f64,
}

impl PullbackReport {
    pub fn worst(&self) -> f64 {
        self.lambda.max(self.omega).max(self.morphism)
    }
}

impl fmt::Display for PullbackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pullback_lambda = {:.6e}", self.lambda)?;
        writeln!(f, "pullback_omega = {:.6e}", self.omega)?;
        writeln!(f, "pullback_commutes_with_d = {:.6e}", self.morphism)
    }
}

/// Checks `(Tγ, γ)^* λ_h = h∘γ` and `(Tγ, γ)^* Ω_h = −d^Ã(h∘γ)` at the
/// plan's sample points on the base.
pub fn pullback_identities(
    gamma: &VStarSection,
    h: &HamiltonianSection,
    plan: &SamplePlan,
) -> Result<PullbackReport> {
    if !std::sync::Arc::ptr_eq(gamma.chart(), h.chart()) && gamma.chart().phase_vars() != h.chart().phase_vars() {
        return Err(Error::Dimension("γ and h live on different charts".into()));
    }
    let tg = tgamma_morphism(gamma)?;
    let hg = h_of_gamma(h, gamma)?;
    let omega = omega_h::<f64>(h)?;
    let lambda = tg.pullback(&lambda_h::<f64>(h)?)?.max_deviation(&hg, plan)?;
    let pulled = tg.pullback(&omega)?;
    let omega_dev = pulled.combine(1.0, &hg.differential()?, 1.0)?.max_abs(plan)?;
    let prolong = omega.chart().clone();
    let mut probes = Vec::new();
    for v in prolong.vars() {
        probes.push(KSection::<f64>::function(prolong.clone(), Expr::var(v))?);
    }
    for a in 0..prolong.rank() {
        probes.push(KSection::<f64>::basis(prolong.clone(), a)?);
    }
    let mut morphism: f64 = 0.0;
    for s in &probes {
        let lhs = tg.pullback(s)?.differential()?;
        morphism = morphism.max(lhs.max_deviation(&tg.pullback(&s.differential()?)?, plan)?);
    }
    Ok(PullbackReport { lambda, omega: omega_dev, morphism })
}

/// Deviations of `Ω_h`, `λ_h`, `η` restricted along `T^V V* → T^Ã V*` from
/// `Ω_V`, `λ_V` and zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalReport {
    pub omega: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl VerticalReport {
    pub fn worst(&self) -> f64 {
        self.omega.max(self.lambda).max(self.eta)
    }
}

impl fmt::Display for VerticalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertical_omega = {:.6e}", self.omega)?;
        writeln!(f, "vertical_lambda = {:.6e}", self.lambda)?;
        writeln!(f, "vertical_eta = {:.6e}", self.eta)
    }
}

/// The inclusion `(i_V, Id)` of `T^V V*` into `T^Ã V*`.
pub fn vertical_inclusion(h: &HamiltonianSection) -> Result<Morphism> {
    let chart = h.chart();
    let n = chart.affine_rank();
    let src = std::sync::Arc::new(chart.vertical_chart().prolongation(chart.fiber_vars())?);
    let base = chart.phase_vars().iter().map(|v| Expr::var(v)).collect();
    let mut fiber = vec![vec![Expr::num(0.0); 2 * n]; 2 * n + 1];
    for a in 0..n {
        fiber[1 + a][a] = Expr::num(1.0);
        fiber[n + 1 + a][n + a] = Expr::num(1.0);
    }
    Morphism::new(src, chart.prolongation_chart(), base, fiber)
}

pub fn vertical_restriction_check(h: &HamiltonianSection, plan: &SamplePlan) -> Result<VerticalReport> {
    let chart = h.chart();
    let inc = vertical_inclusion(h)?;
    let vertical = chart.vertical_chart();
    let src = inc.src().clone();
    let omega_v = canonical_symplectic::<f64>(&vertical, src.clone(), chart.fiber_vars())?;
    let lambda_v = liouville::<f64>(&vertical, src, chart.fiber_vars())?;
    Ok(VerticalReport {
        omega: inc.pullback(&omega_h::<f64>(h)?)?.max_deviation(&omega_v, plan)?,
        lambda: inc.pullback(&lambda_h::<f64>(h)?)?.max_deviation(&lambda_v, plan)?,
        eta: inc.pullback(&eta::<f64>(chart)?)?.max_abs(plan)?,
    })
}
