//! Built-in models: the trivial fibration of classical time-dependent
//! mechanics, affgebroids induced by Lie algebroids, and the reduced rigid
//! body.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::affgebroid::{AffgebroidChart, CoSection, HamiltonianSection};
use crate::algebroid::{validate_chart, AlgebroidChart};
use crate::expr::{parse, Expr};
use crate::sample::SamplePlan;
use crate::{Error, Result};

/// A chart with a Hamiltonian, named candidate sections and sampling boxes.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub chart: Arc<AffgebroidChart>,
    pub hamiltonian: HamiltonianSection,
    pub sections: BTreeMap<String, CoSection>,
    /// Sample points for pointwise checks.
    pub plan: SamplePlan,
    /// Boxes for initial points of trajectories; variables without an entry
    /// use the box of `plan`.
    pub x0_boxes: BTreeMap<String, (f64, f64)>,
}

impl Model {
    pub fn section(&self, name: &str) -> Result<&CoSection> {
        self.sections.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.sections.keys().map(String::as_str).collect();
            Error::Model(format!("unknown section `{name}` (known: {})", known.join(", ")))
        })
    }

    /// Plan for initial points of trajectories.
    pub fn x0_plan(&self, count: usize, seed: u64) -> SamplePlan {
        let mut plan = self.plan.clone().with_count(count).with_seed(seed);
        plan.boxes.extend(self.x0_boxes.iter().map(|(k, v)| (k.clone(), *v)));
        plan
    }

    fn with_sections(mut self, sections: impl IntoIterator<Item = (&'static str, CoSection)>) -> Self {
        self.sections.extend(sections.into_iter().map(|(k, v)| (k.to_string(), v)));
        self
    }
}

fn exprs(srcs: &[String]) -> Result<Vec<Expr>> {
    srcs.iter().map(|s| parse(s).map_err(Error::from)).collect()
}

fn indexed(stem: &str, dim: usize) -> Vec<String> {
    if dim == 1 {
        vec![stem.to_string()]
    } else {
        (1..=dim).map(|k| format!("{stem}{k}")).collect()
    }
}

/// `ℝ × ℝ^dim → ℝ` with coordinates `(t, q)` and fiber coordinates `p`:
/// `ρ(e_0) = ∂/∂t`, `ρ(e_α) = ∂/∂q^α`, all brackets zero. For `dim = 1` the
/// names are `t, q, p`, otherwise `q1.., p1..`.
pub fn trivial_fibration(dim: usize) -> Result<Arc<AffgebroidChart>> {
    if dim == 0 {
        return Err(Error::Model("trivial fibration needs at least one q".into()));
    }
    let m = dim + 1;
    let mut vars = vec!["t".to_string()];
    vars.extend(indexed("q", dim));
    let unit = |k: usize| (0..m).map(|i| Expr::num(if i == k { 1.0 } else { 0.0 })).collect::<Vec<_>>();
    let zero = || Expr::num(0.0);
    Ok(Arc::new(AffgebroidChart::new(
        vars,
        indexed("p", dim),
        unit(0),
        (1..=dim).map(unit).collect(),
        vec![vec![zero(); dim]; dim],
        vec![vec![vec![zero(); dim]; dim]; dim],
    )?))
}

fn sum_over(dim: usize, term: impl Fn(&str, &str) -> String) -> String {
    indexed("q", dim).iter().zip(indexed("p", dim)).map(|(q, p)| term(q, &p)).collect::<Vec<_>>().join(" + ")
}

/// Exact section `d^Ã W` of `chart`.
pub fn exact_section(chart: &Arc<AffgebroidChart>, potential: &str) -> Result<CoSection> {
    CoSection::exact(chart.clone(), &parse(potential)?)
}

/// Free particle `H = Σ p²/2` on the trivial fibration, with sections
/// `hj` (`W = Σ q²/(2(t+1))`, an HJ solution), `cubic` (`W = Σ q³/3`, not a
/// solution) and `zero`. Samples take `t ∈ [0, 2]`; trajectories start at
/// `t = 0` with `|q| ≤ 0.9`, inside the blow-up time of the `cubic` flow.
pub fn free_particle(dim: usize) -> Result<Model> {
    let chart = trivial_fibration(dim)?;
    let h = HamiltonianSection::new(chart.clone(), parse(&sum_over(dim, |_, p| format!("{p}^2/2")))?)?;
    let model = Model {
        name: format!("trivial:{dim}"),
        hamiltonian: h,
        sections: BTreeMap::new(),
        plan: SamplePlan::default().with_box("t", 0.0, 2.0),
        x0_boxes: std::iter::once(("t".to_string(), (0.0, 0.0)))
            .chain(indexed("q", dim).into_iter().map(|q| (q, (-0.9, 0.9))))
            .collect(),
        chart: chart.clone(),
    };
    Ok(model.with_sections([
        ("hj", exact_section(&chart, &sum_over(dim, |q, _| format!("{q}^2/(2*(t+1))")))?),
        ("cubic", exact_section(&chart, &sum_over(dim, |q, _| format!("{q}^3/3")))?),
        ("zero", exact_section(&chart, "0")?),
    ]))
}

/// Harmonic oscillator `H = Σ (p² + q²)/2`, with sections `hj`
/// (`W = Σ (q²/2) cot t`), `quadratic` (`W = Σ q²/2`, not a solution) and
/// `zero`. Samples take `t ∈ [0.2, 2.9]`, clear of the poles of `cot`;
/// trajectories start at `t = 0.3`.
pub fn oscillator(dim: usize) -> Result<Model> {
    let chart = trivial_fibration(dim)?;
    let h = HamiltonianSection::new(chart.clone(), parse(&sum_over(dim, |q, p| format!("({p}^2 + {q}^2)/2")))?)?;
    let model = Model {
        name: format!("trivial:{dim}:oscillator"),
        hamiltonian: h,
        sections: BTreeMap::new(),
        plan: SamplePlan::default().with_box("t", 0.2, 2.9),
        x0_boxes: BTreeMap::from([("t".to_string(), (0.3, 0.3))]),
        chart: chart.clone(),
    };
    Ok(model.with_sections([
        ("hj", exact_section(&chart, &sum_over(dim, |q, _| format!("{q}^2/2*cos(t)/sin(t)")))?),
        ("quadratic", exact_section(&chart, &sum_over(dim, |q, _| format!("{q}^2/2")))?),
        ("zero", exact_section(&chart, "0")?),
    ]))
}

/// The affgebroid `Ẽ = E × ℝ` of a Lie algebroid `E`: `e_0 = (0, 1)` has zero
/// anchor and zero brackets, the `e_α` keep the structure of `E`.
pub fn linear_algebroid(chart: &AlgebroidChart, fiber_vars: Vec<String>) -> Result<Arc<AffgebroidChart>> {
    let report = validate_chart(&Arc::new(chart.clone()), &SamplePlan::default())?;
    if !report.is_valid() {
        return Err(Error::Model(format!("input algebroid is not valid:\n{report}")));
    }
    let (m, n) = (chart.base_dim(), chart.rank());
    let rho_v = (0..n).map(|a| (0..m).map(|i| chart.anchor_expr(a, i).clone()).collect()).collect();
    let cv = (0..n)
        .map(|a| (0..n).map(|b| (0..n).map(|c| chart.structure_expr(a, b, c).clone()).collect()).collect())
        .collect();
    Ok(Arc::new(AffgebroidChart::new(
        chart.vars().to_vec(),
        fiber_vars,
        vec![Expr::num(0.0); m],
        rho_v,
        vec![vec![Expr::num(0.0); n]; n],
        cv,
    )?))
}

/// Tangent algebroid of `ℝ^dim` made affine, with `H = Σ y²/2` and sections
/// `constant` (`α_V = (1,…,1)`, an HJ solution), `linear` (`α_V = x`, not
/// one) and `zero`.
pub fn linear_tangent(dim: usize) -> Result<Model> {
    if dim == 0 {
        return Err(Error::Model("tangent algebroid needs dimension at least 1".into()));
    }
    let xs: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    let ys = AffgebroidChart::default_fiber_vars(dim);
    let chart = linear_algebroid(&AlgebroidChart::tangent(xs.clone()), ys.clone())?;
    let h = ys.iter().map(|y| format!("{y}^2/2")).collect::<Vec<_>>().join(" + ");
    let h = HamiltonianSection::new(chart.clone(), parse(&h)?)?;
    let ones = vec![Expr::num(1.0); dim];
    let model = Model {
        name: format!("linear:tangent{dim}"),
        hamiltonian: h,
        sections: BTreeMap::new(),
        plan: SamplePlan::default(),
        x0_boxes: BTreeMap::new(),
        chart: chart.clone(),
    };
    Ok(model.with_sections([
        ("constant", CoSection::new(chart.clone(), Expr::num(0.0), ones)?),
        ("linear", CoSection::new(chart.clone(), Expr::num(0.0), exprs(&xs)?)?),
        ("zero", CoSection::new(chart.clone(), Expr::num(0.0), vec![Expr::num(0.0); dim])?),
    ]))
}

/// Reduced rigid body over time: base `t`, fiber `Pi1, Pi2, Pi3`,
/// `ρ(e_0) = ∂/∂t`, `ρ(e_α) = 0`, `[e_α, e_β] = ε_{αβγ} e_γ` and
/// `H = Σ Π_α²/(2 I_α)`. Sections: `zero` and `drift` (`α = t e^0`).
pub fn rigid_body(inertia: [f64; 3]) -> Result<Model> {
    if inertia.iter().any(|&i| !(i > 0.0) || !i.is_finite()) {
        return Err(Error::Model(format!("inertia must be positive, got {inertia:?}")));
    }
    let eps = |a: usize, b: usize, c: usize| -> f64 {
        match (a, b, c) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let cv = (0..3)
        .map(|a| (0..3).map(|b| (0..3).map(|c| Expr::num(eps(a, b, c))).collect()).collect())
        .collect();
    let fiber: Vec<String> = (1..=3).map(|k| format!("Pi{k}")).collect();
    let chart = Arc::new(AffgebroidChart::new(
        vec!["t".into()],
        fiber.clone(),
        vec![Expr::num(1.0)],
        vec![vec![Expr::num(0.0)]; 3],
        vec![vec![Expr::num(0.0); 3]; 3],
        cv,
    )?);
    let h = fiber
        .iter()
        .zip(inertia)
        .map(|(p, i)| format!("{p}^2/(2*{i:?})"))
        .collect::<Vec<_>>()
        .join(" + ");
    let h = HamiltonianSection::new(chart.clone(), parse(&h)?)?;
    let model = Model {
        name: format!("rigid:{},{},{}", inertia[0], inertia[1], inertia[2]),
        hamiltonian: h,
        sections: BTreeMap::new(),
        plan: SamplePlan::default(),
        x0_boxes: BTreeMap::new(),
        chart: chart.clone(),
    };
    Ok(model.with_sections([
        ("zero", CoSection::new(chart.clone(), Expr::num(0.0), vec![Expr::num(0.0); 3])?),
        ("drift", CoSection::new(chart.clone(), Expr::var("t"), vec![Expr::num(0.0); 3])?),
    ]))
}

/// Looks up a built-in model by name:
///
/// * `trivial:<dim>` free particle, `trivial:<dim>:oscillator` oscillator
/// * `linear:tangent<dim>`
/// * `rigid:<I1>,<I2>,<I3>`
pub fn by_name(name: &str) -> Result<Model> {
    let bad = || Error::Model(format!("unknown model `{name}`"));
    let count = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(rest) = name.strip_prefix("trivial:") {
        return match rest.split_once(':') {
            None => free_particle(count(rest)?),
            Some((d, "oscillator")) => oscillator(count(d)?),
            Some((d, "free")) => free_particle(count(d)?),
            Some(_) => Err(bad()),
        };
    }
    if let Some(rest) = name.strip_prefix("linear:tangent") {
        return linear_tangent(count(rest)?);
    }
    if let Some(rest) = name.strip_prefix("rigid:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let inertia: [f64; 3] = parts.try_into().map_err(|_| bad())?;
        return rigid_body(inertia);
    }
    Err(bad())
}
