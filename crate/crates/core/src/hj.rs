//! The Hamilton-Jacobi equation `d^V f(h, α) = 0` and its equivalence with
//! the flow condition along integral curves.

use std::collections::BTreeMap;
use std::fmt;

use crate::affgebroid::{CoSection, HamiltonianSection};
use crate::algebroid::KSection;
use crate::dynamics::{hamilton_rhs, integrate_reduced, reduced_field, Trajectory};
use crate::expr::{self, Bound, Expr};
use crate::sample::SamplePlan;
use crate::scalar::max_abs;
use crate::{Error, Result};

/// `d^Ã α` above this makes `α` fail the cocycle test.
pub const COCYCLE_TOL: f64 = 1e-8;
/// `d^V f` at or below this means the HJ equation holds.
pub const HJ_TOL: f64 = 1e-8;
/// Trajectory residual at or below this means the flow condition holds.
pub const FLOW_TOL: f64 = 1e-6;
/// The reduced field reproduces the x-equations up to this.
pub const X_EQUATION_TOL: f64 = 1e-12;
/// Padding of the sampling box drawn around a trajectory.
pub const TRAJECTORY_PAD: f64 = 0.1;

/// `f(h, α) = α_0 + H(x, α_V(x))`.
pub fn f_of(h: &HamiltonianSection, alpha: &CoSection) -> Expr {
    expr::add(alpha.alpha0().clone(), h.composed(alpha.alpha_v()))
}

/// `max |d^Ã α|` over the plan's points.
pub fn cocycle_residual(alpha: &CoSection, plan: &SamplePlan) -> Result<f64> {
    alpha.as_one_section::<f64>()?.differential()?.max_abs(plan)
}

/// `d^V f(h, α)` as a 1-section of the vertical algebroid.
fn hj_section(alpha: &CoSection, h: &HamiltonianSection) -> Result<KSection<f64>> {
    KSection::function(h.chart().vertical_chart(), f_of(h, alpha))?.differential()
}

/// Values of `f(h, α)` and the HJ residual over a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjReport {
    pub cocycle_residual: f64,
    pub hj_residual: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub f_mean: f64,
    pub points: usize,
}

impl HjReport {
    pub fn holds(&self) -> bool {
        self.cocycle_residual <= COCYCLE_TOL && self.hj_residual <= HJ_TOL
    }
}

impl fmt::Display for HjReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cocycle_residual = {:.6e}", self.cocycle_residual)?;
        writeln!(f, "f_min = {:.6e}", self.f_min)?;
        writeln!(f, "f_max = {:.6e}", self.f_max)?;
        writeln!(f, "f_mean = {:.6e}", self.f_mean)?;
        writeln!(f, "hj_residual = {:.6e}", self.hj_residual)?;
        writeln!(f, "points = {}", self.points)?;
        writeln!(f, "hj_solution = {}", self.holds())
    }
}

/// `max |ρ^i_α ∂f/∂x^i|` over the plan's points.
pub fn hj_residual(alpha: &CoSection, h: &HamiltonianSection, plan: &SamplePlan) -> Result<f64> {
    hj_section(alpha, h)?.max_abs(plan)
}

/// Cocycle residual, HJ residual and statistics of `f(h, α)`.
pub fn hj_report(alpha: &CoSection, h: &HamiltonianSection, plan: &SamplePlan) -> Result<HjReport> {
    let vars = h.chart().vars();
    let f = Bound::new(&f_of(h, alpha), vars)?;
    let points = plan.points::<f64, _>(vars);
    let values = points.iter().map(|p| f.value(p)).collect::<Result<Vec<f64>, _>>()?;
    let (f_min, f_max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(HjReport {
        cocycle_residual: cocycle_residual(alpha, plan)?,
        hj_residual: hj_residual(alpha, h, plan)?,
        f_min,
        f_max,
        f_mean: values.iter().sum::<f64>() / values.len().max(1) as f64,
        points: points.len(),
    })
}

/// Outcome of checking the flow condition along one integral curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub x0: Vec<f64>,
    /// `max_t max_γ |r_γ(t)|`, the defect of `β(t) = μ(α(c(t)))` in the
    /// y-equations.
    pub max_r: f64,
    /// Disagreement between the reduced field and the x-equations along `β`.
    pub x_residual: f64,
    /// HJ residual on a box around the trajectory.
    pub hj_residual: f64,
    pub cocycle_residual: f64,
    pub steps: usize,
    /// Box sampled for `hj_residual`.
    pub hj_box: BTreeMap<String, (f64, f64)>,
}

impl TheoremReport {
    /// Condition (i): `β` solves the Hamilton equations.
    pub fn flow_holds(&self) -> bool {
        self.max_r <= FLOW_TOL
    }

    /// Condition (ii): the HJ equation holds around the trajectory.
    pub fn hj_holds(&self) -> bool {
        self.hj_residual <= HJ_TOL
    }
}

/// Residuals `r_γ = ∂α_γ/∂x^i X^i − RHS_γ(c, α_V(c))` and the x-equation
/// defect at one base point.
pub fn flow_residuals(alpha: &CoSection, h: &HamiltonianSection, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = h.chart().base_dim();
    let field = reduced_field(alpha, h, x)?;
    let (values, grads) = alpha.jet(x)?;
    let beta: Vec<f64> = x.iter().copied().chain(values[1..].iter().copied()).collect();
    let rhs = hamilton_rhs(h, &beta)?;
    let x_residual = max_abs(field.iter().zip(&rhs[..m]).map(|(a, b)| a - b));
    let r = grads[1..]
        .iter()
        .zip(&rhs[m..])
        .map(|(g, target)| g.iter().zip(&field).map(|(a, b)| a * b).sum::<f64>() - target)
        .collect();
    Ok((r, x_residual))
}

fn trajectory_box(traj: &Trajectory<f64>, vars: &[String]) -> BTreeMap<String, (f64, f64)> {
    vars.iter()
        .enumerate()
        .map(|(i, v)| {
            let (lo, hi) = traj
                .states
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s[i]), hi.max(s[i])));
            (v.clone(), (lo - TRAJECTORY_PAD, hi + TRAJECTORY_PAD))
        })
        .collect()
}

/// Integrates the reduced field of `α` from `x0` over `[0, horizon]`,
/// measures the defect of `β(t)` in the Hamilton equations, and the HJ
/// residual on a padded box around the curve sampled with `plan`'s count
/// and seed.
///
/// Fails with [`Error::NotCocycle`] when `d^Ã α ≠ 0` on `plan`.
pub fn verify_theorem(
    alpha: &CoSection,
    h: &HamiltonianSection,
    x0: &[f64],
    horizon: f64,
    step: f64,
    plan: &SamplePlan,
) -> Result<TheoremReport> {
    let cocycle = cocycle_residual(alpha, plan)?;
    if !(cocycle <= COCYCLE_TOL) {
        return Err(Error::NotCocycle { residual: cocycle });
    }
    let traj = integrate_reduced(alpha, h, x0, 0.0, horizon, step)?.into_result()?;
    let mut max_r: f64 = 0.0;
    let mut x_residual: f64 = 0.0;
    for x in &traj.states {
        let (r, xr) = flow_residuals(alpha, h, x)?;
        max_r = max_r.max(max_abs(r));
        x_residual = x_residual.max(xr);
    }
    let hj_box = trajectory_box(&traj, h.chart().vars());
    let mut local = plan.clone();
    local.boxes = hj_box.clone();
    Ok(TheoremReport {
        x0: x0.to_vec(),
        max_r,
        x_residual,
        hj_residual: hj_residual(alpha, h, &local)?,
        cocycle_residual: cocycle,
        steps: traj.len() - 1,
        hj_box,
    })
}

/// Verdicts over a set of initial points.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub runs: Vec<TheoremReport>,
    pub cocycle_residual: f64,
    /// HJ residual on the plan's box.
    pub hj_residual: f64,
}

impl BatchReport {
    pub fn max_r(&self) -> f64 {
        self.runs.iter().map(|r| r.max_r).fold(0.0, f64::max)
    }

    pub fn x_residual(&self) -> f64 {
        self.runs.iter().map(|r| r.x_residual).fold(0.0, f64::max)
    }

    /// Condition (i) on every sampled curve.
    pub fn condition_i(&self) -> bool {
        self.runs.iter().all(TheoremReport::flow_holds)
    }

    /// Condition (ii) on the plan's box.
    pub fn condition_ii(&self) -> bool {
        self.hj_residual <= HJ_TOL
    }

    pub fn agree(&self) -> bool {
        self.condition_i() == self.condition_ii()
    }

    /// The reduced field must reproduce the x-equations exactly.
    pub fn consistent(&self) -> bool {
        self.x_residual() <= X_EQUATION_TOL
    }
}

impl fmt::Display for BatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# point  x0  max_r  hj_local")?;
        for (k, run) in self.runs.iter().enumerate() {
            let x0: Vec<String> = run.x0.iter().map(|v| format!("{v:.6}")).collect();
            writeln!(f, "# {k}  ({})  {:.6e}  {:.6e}", x0.join(", "), run.max_r, run.hj_residual)?;
        }
        writeln!(f, "cocycle_residual = {:.6e}", self.cocycle_residual)?;
        writeln!(f, "hj_residual = {:.6e}", self.hj_residual)?;
        writeln!(f, "max_r = {:.6e}", self.max_r())?;
        writeln!(f, "x_equation_residual = {:.6e}", self.x_residual())?;
        writeln!(f, "condition_i = {}", self.condition_i())?;
        writeln!(f, "condition_ii = {}", self.condition_ii())?;
        writeln!(f, "(i) and (ii) {}", if self.agree() { "AGREE" } else { "DISAGREE" })
    }
}

/// Runs [`verify_theorem`] from each initial point.
pub fn verify_batch(
    alpha: &CoSection,
    h: &HamiltonianSection,
    x0s: &[Vec<f64>],
    horizon: f64,
    step: f64,
    plan: &SamplePlan,
) -> Result<BatchReport> {
    let cocycle_residual = cocycle_residual(alpha, plan)?;
    if !(cocycle_residual <= COCYCLE_TOL) {
        return Err(Error::NotCocycle { residual: cocycle_residual });
    }
    let runs = x0s
        .iter()
        .map(|x0| verify_theorem(alpha, h, x0, horizon, step, plan))
        .collect::<Result<_>>()?;
    Ok(BatchReport { runs, cocycle_residual, hj_residual: hj_residual(alpha, h, plan)? })
}

/// An initial point whose curve violates the flow condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Sample point where the HJ residual is large.
    pub center: Vec<f64>,
    pub center_hj: f64,
    pub report: TheoremReport,
}

/// Searches for a curve that violates the flow condition near the points of
/// `plan` where `|d^V f| ≥ hj_threshold`. Around each of the worst five such
/// points, `tries` seeded initial points are drawn from a cube of half-width
/// `radius`; curves that fail to integrate are skipped. Returns the first
/// curve with `max_r ≥ r_threshold`.
#[allow(clippy::too_many_arguments)]
pub fn find_witness(
    alpha: &CoSection,
    h: &HamiltonianSection,
    plan: &SamplePlan,
    horizon: f64,
    step: f64,
    hj_threshold: f64,
    r_threshold: f64,
    radius: f64,
    tries: usize,
) -> Result<Option<Witness>> {
    let section = hj_section(alpha, h)?;
    let vars = h.chart().vars();
    let mut centers: Vec<(f64, Vec<f64>)> = plan
        .points::<f64, _>(vars)
        .into_iter()
        .map(|p| Ok((max_abs(section.values(&p)?), p)))
        .collect::<Result<_>>()?;
    centers.retain(|(r, _)| *r >= hj_threshold);
    centers.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (k, (center_hj, center)) in centers.into_iter().take(5).enumerate() {
        let mut near = SamplePlan::default().with_count(tries).with_seed(plan.seed.wrapping_add(k as u64));
        for (v, c) in vars.iter().zip(&center) {
            near = near.with_box(v, c - radius, c + radius);
        }
        for x0 in near.points::<f64, _>(vars) {
            let report = match verify_theorem(alpha, h, &x0, horizon, step, plan) {
                Ok(r) => r,
                Err(Error::Integration { .. }) => continue,
                Err(e) => return Err(e),
            };
            if report.max_r >= r_threshold {
                return Ok(Some(Witness { center, center_hj, report }));
            }
        }
    }
    Ok(None)
}
