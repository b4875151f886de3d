use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::{AffgebroidChart, HamiltonianSection};
use crate::algebroid::{canonical_symplectic, liouville, KSection, Morphism};
use crate::expr::{self, Expr};
use crate::sample::SamplePlan;
use crate::scalar::max_abs;
use crate::{Error, Real, Result};

/// Residual above which the Reeb system is declared unsolvable.
pub const REEB_SOLVE_TOL: f64 = 1e-8;

/// `η = ẽ^0` on the prolongation.
pub fn eta<T: Real>(chart: &AffgebroidChart) -> Result<KSection<T>> {
    KSection::basis(chart.prolongation_chart(), 0)
}

/// `Ω_h` in the basis `(ẽ_0, ẽ_α, ē_α)`:
///
/// ```text
/// Ω_h = ẽ^γ∧ē^γ + ½ C^α_{γβ} y_α ẽ^γ∧ẽ^β
///     + (ρ^i_γ ∂H/∂x^i − C^α_{0γ} y_α) ẽ^γ∧ẽ^0 + ∂H/∂y_γ ē^γ∧ẽ^0
/// ```
pub fn omega_h<T: Real>(h: &HamiltonianSection) -> Result<KSection<T>> {
    let chart = h.chart();
    let n = chart.affine_rank();
    let y: Vec<Expr> = chart.fiber_vars().iter().map(|v| Expr::var(v)).collect();
    let hx: Vec<Expr> = chart.vars().iter().map(|v| h.partial(v)).collect();
    let mut entries = Vec::new();
    for g in 0..n {
        entries.push((vec![1 + g, n + 1 + g], Expr::num(1.0)));
        for b in 0..n {
            if b == g {
                continue;
            }
            let coeff = expr::sum(
                (0..n).map(|a| expr::mul(expr::mul(Expr::num(0.5), chart.cv()[g][b][a].clone()), y[a].clone())),
            );
            if !coeff.is_zero_literal() {
                entries.push((vec![1 + g, 1 + b], coeff));
            }
        }
        let anchor_term = expr::sum(
            hx.iter().enumerate().map(|(i, hi)| expr::mul(chart.rho_v()[g][i].clone(), hi.clone())),
        );
        let bracket_term = expr::sum((0..n).map(|a| expr::mul(chart.c0()[g][a].clone(), y[a].clone())));
        let coeff = expr::sub(anchor_term, bracket_term);
        if !coeff.is_zero_literal() {
            entries.push((vec![1 + g, 0], coeff));
        }
        let hy = h.partial(&chart.fiber_vars()[g]);
        if !hy.is_zero_literal() {
            entries.push((vec![n + 1 + g, 0], hy));
        }
    }
    KSection::from_exprs(chart.prolongation_chart(), 2, entries)
}

/// The morphism `(Th, h)` from `T^Ã V*` to `T^Ã A^+`, with base map
/// `(x, y) ↦ (x, −H, y)` and
///
/// ```text
/// ẽ_a ↦ ẽ_a − ρ^i_a ∂H/∂x^i ē_0      ē_α ↦ ē_α − ∂H/∂y_α ē_0
/// ```
pub fn th_morphism(h: &HamiltonianSection) -> Result<Morphism> {
    let chart = h.chart();
    let n = chart.affine_rank();
    let bidual = chart.bidual_chart();
    let src = chart.prolongation_chart();
    let dst = chart.dual_prolongation_chart()?;
    let zero = || Expr::num(0.0);

    let mut base: Vec<Expr> = chart.vars().iter().map(|v| Expr::var(v)).collect();
    base.push(expr::negate(h.hamiltonian().clone()));
    base.extend(chart.fiber_vars().iter().map(|v| Expr::var(v)));

    let hx: Vec<Expr> = chart.vars().iter().map(|v| h.partial(v)).collect();
    let mut fiber = vec![vec![zero(); 2 * n + 1]; 2 * n + 2];
    for a in 0..=n {
        fiber[a][a] = Expr::num(1.0);
        let dh = expr::sum(hx.iter().enumerate().map(|(i, hi)| expr::mul(bidual.anchor_expr(a, i).clone(), hi.clone())));
        fiber[n + 1][a] = expr::negate(dh);
    }
    for (al, y) in chart.fiber_vars().iter().enumerate() {
        fiber[n + 2 + al][n + 1 + al] = Expr::num(1.0);
        fiber[n + 1][n + 1 + al] = expr::negate(h.partial(y));
    }
    Morphism::new(src, dst, base, fiber)
}

/// `λ_h = (Th, h)^* λ_Ã`.
pub fn lambda_h<T: Real>(h: &HamiltonianSection) -> Result<KSection<T>> {
    let chart = h.chart();
    let m = th_morphism(h)?;
    let lambda = liouville::<T>(&chart.bidual_chart(), m.dst().clone(), &chart.dual_fiber_vars())?;
    m.pullback(&lambda)
}

/// `(Th, h)^* Ω_Ã`, which must coincide with [`omega_h`].
pub fn omega_h_by_pullback<T: Real>(h: &HamiltonianSection) -> Result<KSection<T>> {
    let chart = h.chart();
    let m = th_morphism(h)?;
    let omega = canonical_symplectic::<T>(&chart.bidual_chart(), m.dst().clone(), &chart.dual_fiber_vars())?;
    m.pullback(&omega)
}

/// Reeb section from its closed formula, coefficients in `(ẽ_0, ẽ_α, ē_α)`:
///
/// ```text
/// R_h = ẽ_0 + ∂H/∂y_α ẽ_α − (C^γ_{αβ} y_γ ∂H/∂y_β + ρ^i_α ∂H/∂x^i − C^γ_{0α} y_γ) ē_α
/// ```
pub fn reeb<T: Real>(h: &HamiltonianSection, xy: &[T]) -> Result<Vec<T>> {
    let chart = h.chart();
    let (m, n) = (chart.base_dim(), chart.affine_rank());
    let r = n + 1;
    let (_, grad) = h.value_grad(xy)?;
    let (hx, hy) = grad.split_at(m);
    let y = &xy[m..];
    let (anchor, c) = chart.anchor_and_structure(&xy[..m])?;
    let mut out = vec![T::zero(); 2 * n + 1];
    out[0] = T::one();
    for a in 0..n {
        out[1 + a] = hy[a];
        let mut s = T::zero();
        for b in 0..n {
            for g in 0..n {
                s = s + c[((1 + a) * r + 1 + b) * r + 1 + g] * y[g] * hy[b];
            }
        }
        for i in 0..m {
            s = s + anchor[(1 + a) * m + i] * hx[i];
        }
        for g in 0..n {
            s = s - c[(1 + a) * r + 1 + g] * y[g];
        }
        out[n + 1 + a] = -s;
    }
    Ok(out)
}

/// Solution of `i_R Ω_h = 0`, `i_R η = 1` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReebSolution {
    pub coeffs: Vec<f64>,
    /// Max-norm residual of the overdetermined system.
    pub residual: f64,
    /// Smallest singular value of the system matrix.
    pub min_singular: f64,
}

/// Solves the defining equations of the Reeb section by least squares.
///
/// The `(2n+2)×(2n+1)` system has rows `Σ_a R^a Ω_{ab} = 0` for every `b`
/// and a final row `R^0 = 1`. A residual above [`REEB_SOLVE_TOL`] or a
/// vanishing singular value means `(Ω_h, η)` is degenerate at the point.
pub fn reeb_solve(h: &HamiltonianSection, xy: &[f64]) -> Result<ReebSolution> {
    let omega = omega_h::<f64>(h)?;
    let sol = solve_with(&omega, xy)?;
    if !(sol.residual <= REEB_SOLVE_TOL) || sol.min_singular <= 1e-12 {
        return Err(Error::Degenerate { residual: sol.residual, min_singular: sol.min_singular });
    }
    Ok(sol)
}

fn omega_matrix(omega: &KSection<f64>, xy: &[f64]) -> Result<DMatrix<f64>> {
    let size = omega.chart().rank();
    let vals = omega.values(xy)?;
    let mut w = DMatrix::zeros(size, size);
    for (set, v) in omega.index_sets().iter().zip(vals) {
        w[(set[0], set[1])] = v;
        w[(set[1], set[0])] = -v;
    }
    Ok(w)
}

fn solve_with(omega: &KSection<f64>, xy: &[f64]) -> Result<ReebSolution> {
    let size = omega.chart().rank();
    let w = omega_matrix(omega, xy)?;
    let mut a = DMatrix::zeros(size + 1, size);
    for b in 0..size {
        for c in 0..size {
            a[(b, c)] = w[(c, b)];
        }
    }
    a[(size, 0)] = 1.0;
    let mut rhs = DVector::zeros(size + 1);
    rhs[size] = 1.0;
    let svd = a.clone().svd(true, true);
    let min_singular = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let v = svd.solve(&rhs, 1e-14).map_err(|e| Error::Invalid(e.to_string()))?;
    let residual = max_abs((&a * &v - rhs).iter().copied());
    Ok(ReebSolution { coeffs: v.iter().copied().collect(), residual, min_singular })
}

/// `i_R Ω_h` and `i_R η − 1` for coefficients `r` at a point.
fn contraction_residual(omega: &KSection<f64>, xy: &[f64], r: &[f64]) -> Result<f64> {
    let w = omega_matrix(omega, xy)?;
    let v = DVector::from_column_slice(r);
    let contracted = w.transpose() * v;
    Ok(max_abs(contracted.iter().copied()).max((r[0] - 1.0).abs()))
}

/// Pointwise checks of the cosymplectic pair `(Ω_h, η)` and its Reeb section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosymplecticReport {
    /// `max |d η|`
    pub d_eta: f64,
    /// `max |d Ω_h|`
    pub d_omega: f64,
    /// `max |(Th, h)^* Ω_Ã − Ω_h|`
    pub omega_pullback: f64,
    /// `max |Ω_h + d λ_h|`
    pub omega_exact: f64,
    /// Worst residual of the Reeb linear system.
    pub solve_residual: f64,
    /// Smallest singular value seen in the Reeb system.
    pub min_singular: f64,
    /// `max |R_closed − R_solved|`
    pub reeb_agreement: f64,
    /// `max(|i_R Ω_h|, |i_R η − 1|)` for the closed formula.
    pub reeb_contraction: f64,
    pub points: usize,
}

impl CosymplecticReport {
    pub fn check(h: &HamiltonianSection, plan: &SamplePlan) -> Result<Self> {
        let chart = h.chart();
        let eta = eta::<f64>(chart)?;
        let omega = omega_h::<f64>(h)?;
        let d_eta = eta.differential()?.max_abs(plan)?;
        let d_omega = omega.differential()?.max_abs(plan)?;
        let omega_pullback = omega_h_by_pullback::<f64>(h)?.max_deviation(&omega, plan)?;
        let minus_d_lambda = lambda_h::<f64>(h)?.differential()?;
        let omega_exact = omega.combine(1.0, &minus_d_lambda, 1.0)?.max_abs(plan)?;

        let mut solve_residual: f64 = 0.0;
        let mut min_singular = f64::INFINITY;
        let mut reeb_agreement: f64 = 0.0;
        let mut reeb_contraction: f64 = 0.0;
        let points = plan.points::<f64, _>(&chart.phase_vars());
        for p in &points {
            let closed = reeb(h, p)?;
            let sol = solve_with(&omega, p)?;
            solve_residual = solve_residual.max(sol.residual);
            min_singular = min_singular.min(sol.min_singular);
            reeb_agreement =
                reeb_agreement.max(max_abs(closed.iter().zip(&sol.coeffs).map(|(a, b)| a - b)));
            reeb_contraction = reeb_contraction.max(contraction_residual(&omega, p, &closed)?);
        }
        Ok(CosymplecticReport {
            d_eta,
            d_omega,
            omega_pullback,
            omega_exact,
            solve_residual,
            min_singular,
            reeb_agreement,
            reeb_contraction,
            points: points.len(),
        })
    }

    pub fn holds(&self) -> bool {
        self.d_eta == 0.0
            && self.d_omega <= 1e-8
            && self.omega_pullback <= 1e-10
            && self.omega_exact <= 1e-8
            && self.solve_residual <= 1e-10
            && self.reeb_agreement <= 1e-10
            && self.reeb_contraction <= 1e-10
    }
}

impl fmt::Display for CosymplecticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d_eta = {:.6e}", self.d_eta)?;
        writeln!(f, "d_omega = {:.6e}", self.d_omega)?;
        writeln!(f, "omega_pullback = {:.6e}", self.omega_pullback)?;
        writeln!(f, "omega_exact = {:.6e}", self.omega_exact)?;
        writeln!(f, "reeb_solve_residual = {:.6e}", self.solve_residual)?;
        writeln!(f, "reeb_min_singular = {:.6e}", self.min_singular)?;
        writeln!(f, "reeb_agreement = {:.6e}", self.reeb_agreement)?;
        writeln!(f, "reeb_contraction = {:.6e}", self.reeb_contraction)?;
        writeln!(f, "points = {}", self.points)?;
        writeln!(f, "cosymplectic = {}", self.holds())
    }
}

