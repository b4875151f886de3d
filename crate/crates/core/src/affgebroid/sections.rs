use std::sync::Arc;

use super::AffgebroidChart;
use crate::algebroid::KSection;
use crate::expr::{self, Bound, Expr};
use crate::{Error, Real, Result};

/// Hamiltonian section `h(x, y) = (x, -H(x, y), y)` of `μ: A^+ → V*`.
#[derive(Debug, Clone)]
pub struct HamiltonianSection {
    chart: Arc<AffgebroidChart>,
    hamiltonian: Expr,
    bound: Bound,
}

impl HamiltonianSection {
    /// `hamiltonian` may use the base and fiber coordinates of the chart.
    pub fn new(chart: Arc<AffgebroidChart>, hamiltonian: Expr) -> Result<Self> {
        let bound = Bound::new(&hamiltonian, &chart.phase_vars())?;
        Ok(HamiltonianSection { chart, hamiltonian, bound })
    }

    pub fn chart(&self) -> &Arc<AffgebroidChart> {
        &self.chart
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    /// `H` and its gradient at `(x, y)`: `∂H/∂x^i` first, then `∂H/∂y_α`.
    pub fn value_grad<T: Real>(&self, xy: &[T]) -> Result<(T, Vec<T>)> {
        Ok(self.bound.value_grad(xy)?)
    }

    pub fn value<T: Real>(&self, xy: &[T]) -> Result<T> {
        Ok(self.bound.value(xy)?)
    }

    /// `∂H/∂(var)` as an expression.
    pub fn partial(&self, var: &str) -> Expr {
        self.hamiltonian.partial(var)
    }

    /// `H(x, γ(x))` for fiber values given as expressions on the base.
    pub fn composed(&self, fiber: &[Expr]) -> Expr {
        let map: Vec<(&str, &Expr)> =
            self.chart.fiber_vars().iter().map(String::as_str).zip(fiber.iter()).collect();
        self.hamiltonian.substitute(&map)
    }
}

/// Section `α = α_0 e^0 + α_γ e^γ` of `A^+`.
#[derive(Debug, Clone)]
pub struct CoSection {
    chart: Arc<AffgebroidChart>,
    alpha0: Expr,
    alpha_v: Vec<Expr>,
    bound: Vec<Bound>,
}

impl CoSection {
    pub fn new(chart: Arc<AffgebroidChart>, alpha0: Expr, alpha_v: Vec<Expr>) -> Result<Self> {
        if alpha_v.len() != chart.affine_rank() {
            return Err(Error::Dimension(format!(
                "alphaV needs {} entries, got {}",
                chart.affine_rank(),
                alpha_v.len()
            )));
        }
        let bound = std::iter::once(&alpha0)
            .chain(&alpha_v)
            .map(|e| Bound::new(e, chart.vars()).map_err(Error::from))
            .collect::<Result<_>>()?;
        Ok(CoSection { chart, alpha0, alpha_v, bound })
    }

    /// The coboundary `α = d^Ã S`, i.e. `α_a = ρ^i_a ∂S/∂x^i`.
    pub fn exact(chart: Arc<AffgebroidChart>, potential: &Expr) -> Result<Self> {
        let bidual = chart.bidual_chart();
        let grad: Vec<Expr> = chart.vars().iter().map(|v| potential.partial(v)).collect();
        let mut comps: Vec<Expr> = (0..bidual.rank())
            .map(|a| {
                expr::sum(
                    grad.iter()
                        .enumerate()
                        .map(|(i, g)| expr::mul(bidual.anchor_expr(a, i).clone(), g.clone())),
                )
            })
            .collect();
        let alpha_v = comps.split_off(1);
        let alpha0 = comps.pop().expect("rank is at least one");
        Self::new(chart, alpha0, alpha_v)
    }

    pub fn chart(&self) -> &Arc<AffgebroidChart> {
        &self.chart
    }

    pub fn alpha0(&self) -> &Expr {
        &self.alpha0
    }

    pub fn alpha_v(&self) -> &[Expr] {
        &self.alpha_v
    }

    /// `μ(α)`: the fiber part, a section of `V*`.
    pub fn fiber_part(&self) -> VStarSection {
        VStarSection { chart: self.chart.clone(), gamma: self.alpha_v.clone() }
    }

    /// `(α_0, α_1..α_n)` at `x`.
    pub fn values<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        self.bound.iter().map(|b| b.value(x).map_err(Error::from)).collect()
    }

    /// Values and gradients with respect to the base coordinates.
    pub fn jet<T: Real>(&self, x: &[T]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let mut vals = Vec::with_capacity(self.bound.len());
        let mut grads = Vec::with_capacity(self.bound.len());
        for b in &self.bound {
            let (v, g) = b.value_grad(x)?;
            vals.push(v);
            grads.push(g);
        }
        Ok((vals, grads))
    }

    /// `α` as a 1-section of the bidual algebroid.
    pub fn as_one_section<T: Real>(&self) -> Result<KSection<T>> {
        let coeffs = std::iter::once(self.alpha0.clone()).chain(self.alpha_v.iter().cloned()).collect();
        KSection::one_form(self.chart.bidual_chart(), coeffs)
    }
}

/// Section `γ = γ_α e^α` of `V*`.
#[derive(Debug, Clone)]
pub struct VStarSection {
    chart: Arc<AffgebroidChart>,
    gamma: Vec<Expr>,
}

impl VStarSection {
    pub fn new(chart: Arc<AffgebroidChart>, gamma: Vec<Expr>) -> Result<Self> {
        if gamma.len() != chart.affine_rank() {
            return Err(Error::Dimension(format!(
                "section of V* needs {} entries, got {}",
                chart.affine_rank(),
                gamma.len()
            )));
        }
        for g in &gamma {
            Bound::new(g, chart.vars())?;
        }
        Ok(VStarSection { chart, gamma })
    }

    pub fn chart(&self) -> &Arc<AffgebroidChart> {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.gamma
    }
}
