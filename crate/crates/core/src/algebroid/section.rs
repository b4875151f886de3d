use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use super::AlgebroidChart;
use crate::expr::{Bound, Expr};
use crate::sample::SamplePlan;
use crate::scalar::max_abs;
use crate::{Error, Real, Result};

/// Highest degree a section may have.
pub const MAX_DEGREE: usize = 3;

/// Step of the central differences used to differentiate derived coefficients.
pub const FD_STEP: f64 = 1e-5;

/// Pointwise evaluator of all coefficients of a derived section.
pub type CoeffFn<T> = Arc<dyn Fn(&[T]) -> Result<Vec<T>> + Send + Sync>;

#[derive(Clone)]
enum Coefficients<T> {
    Exprs(Vec<Bound>),
    Derived(CoeffFn<T>),
}

/// Strictly increasing index lists of length `degree` over `0..rank`, in
/// lexicographic order. Coefficient `k` of a section multiplies
/// `e^{I_0} ∧ … ∧ e^{I_{k-1}}` for the `k`-th list `I`.
pub fn index_sets(rank: usize, degree: usize) -> Vec<Vec<usize>> {
    (0..rank).combinations(degree).collect()
}

/// Sorts `indices` and returns the permutation sign; `None` on a repeat.
pub fn sort_signed(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// A degree-`k` alternating section of an algebroid chart.
///
/// Coefficients are either expressions (differentiated exactly by dual
/// numbers) or derived evaluators such as the output of [`KSection::differential`]
/// (differentiated by central differences with step [`FD_STEP`]).
#[derive(Clone)]
pub struct KSection<T> {
    chart: Arc<AlgebroidChart>,
    degree: usize,
    sets: Arc<Vec<Vec<usize>>>,
    coeffs: Coefficients<T>,
}

impl<T> fmt::Debug for KSection<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.coeffs {
            Coefficients::Exprs(_) => "exprs",
            Coefficients::Derived(_) => "derived",
        };
        f.debug_struct("KSection")
            .field("degree", &self.degree)
            .field("rank", &self.chart.rank())
            .field("coefficients", &kind)
            .finish()
    }
}

impl<T: Real> KSection<T> {
    fn check_degree(chart: &AlgebroidChart, degree: usize) -> Result<Arc<Vec<Vec<usize>>>> {
        if degree > MAX_DEGREE {
            return Err(Error::Invalid(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        if degree > chart.rank() {
            return Err(Error::Dimension(format!(
                "degree {degree} exceeds rank {}",
                chart.rank()
            )));
        }
        Ok(Arc::new(index_sets(chart.rank(), degree)))
    }

    /// Section with the listed nonzero coefficients; index lists need not be
    /// sorted (their sign is applied) and repeated lists accumulate.
    pub fn from_exprs(
        chart: Arc<AlgebroidChart>,
        degree: usize,
        entries: Vec<(Vec<usize>, Expr)>,
    ) -> Result<Self> {
        let sets = Self::check_degree(&chart, degree)?;
        let mut exprs = vec![Expr::num(0.0); sets.len()];
        for (indices, e) in entries {
            if indices.len() != degree || indices.iter().any(|&a| a >= chart.rank()) {
                return Err(Error::Dimension(format!("bad index list {indices:?}")));
            }
            let Some((sorted, sign)) = sort_signed(&indices) else {
                return Err(Error::Invalid(format!("repeated index in {indices:?}")));
            };
            let k = sets.binary_search(&sorted).expect("sorted index list is enumerated");
            let term = if sign < 0 { crate::expr::negate(e) } else { e };
            exprs[k] = crate::expr::add(std::mem::replace(&mut exprs[k], Expr::num(0.0)), term);
        }
        let bound = exprs
            .iter()
            .map(|e| Bound::new(e, chart.vars()).map_err(Error::from))
            .collect::<Result<_>>()?;
        Ok(KSection { chart, degree, sets, coeffs: Coefficients::Exprs(bound) })
    }

    pub fn function(chart: Arc<AlgebroidChart>, f: Expr) -> Result<Self> {
        Self::from_exprs(chart, 0, vec![(vec![], f)])
    }

    /// `θ = θ_a e^a`
    pub fn one_form(chart: Arc<AlgebroidChart>, coeffs: Vec<Expr>) -> Result<Self> {
        if coeffs.len() != chart.rank() {
            return Err(Error::Dimension(format!(
                "1-section needs {} coefficients, got {}",
                chart.rank(),
                coeffs.len()
            )));
        }
        let entries = coeffs.into_iter().enumerate().map(|(a, e)| (vec![a], e)).collect();
        Self::from_exprs(chart, 1, entries)
    }

    /// Dual basis section `e^a`.
    pub fn basis(chart: Arc<AlgebroidChart>, a: usize) -> Result<Self> {
        Self::from_exprs(chart, 1, vec![(vec![a], Expr::num(1.0))])
    }

    pub fn zero(chart: Arc<AlgebroidChart>, degree: usize) -> Result<Self> {
        Self::from_exprs(chart, degree, Vec::new())
    }

    /// Section whose coefficients (in [`index_sets`] order) come from `f`.
    pub fn derived(chart: Arc<AlgebroidChart>, degree: usize, f: CoeffFn<T>) -> Result<Self> {
        let sets = Self::check_degree(&chart, degree)?;
        Ok(KSection { chart, degree, sets, coeffs: Coefficients::Derived(f) })
    }

    pub fn chart(&self) -> &Arc<AlgebroidChart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Coefficient expressions, when the section is expression-backed.
    pub fn exprs(&self) -> Option<Vec<&Expr>> {
        match &self.coeffs {
            Coefficients::Exprs(b) => Some(b.iter().map(Bound::expr).collect()),
            Coefficients::Derived(_) => None,
        }
    }

    /// All coefficients at `p`.
    pub fn values(&self, p: &[T]) -> Result<Vec<T>> {
        match &self.coeffs {
            Coefficients::Exprs(b) => b.iter().map(|e| e.value(p).map_err(Error::from)).collect(),
            Coefficients::Derived(f) => f(p),
        }
    }

    /// Coefficient on an arbitrary index list (sign-adjusted, zero on repeats).
    pub fn component(&self, p: &[T], indices: &[usize]) -> Result<T> {
        let Some((sorted, sign)) = sort_signed(indices) else {
            return Ok(T::zero());
        };
        let k = self
            .sets
            .binary_search(&sorted)
            .map_err(|_| Error::Dimension(format!("index list {indices:?} out of range")))?;
        let v = self.values(p)?[k];
        Ok(if sign < 0 { -v } else { v })
    }

    /// Coefficients and their gradients with respect to every chart coordinate.
    pub fn jet(&self, p: &[T]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        match &self.coeffs {
            Coefficients::Exprs(b) => {
                let mut vals = Vec::with_capacity(b.len());
                let mut grads = Vec::with_capacity(b.len());
                for e in b {
                    if e.is_zero() {
                        vals.push(T::zero());
                        grads.push(vec![T::zero(); p.len()]);
                    } else {
                        let (v, g) = e.value_grad(p)?;
                        vals.push(v);
                        grads.push(g);
                    }
                }
                Ok((vals, grads))
            }
            Coefficients::Derived(f) => {
                let vals = f(p)?;
                let h = T::lit(FD_STEP);
                let two_h = h + h;
                let mut grads = vec![vec![T::zero(); p.len()]; vals.len()];
                let mut q = p.to_vec();
                for i in 0..p.len() {
                    q[i] = p[i] + h;
                    let plus = f(&q)?;
                    q[i] = p[i] - h;
                    let minus = f(&q)?;
                    q[i] = p[i];
                    for (k, g) in grads.iter_mut().enumerate() {
                        g[i] = (plus[k] - minus[k]) / two_h;
                    }
                }
                Ok((vals, grads))
            }
        }
    }

    /// The algebroid differential `d^E`, evaluated from the invariant formula
    /// on basis sections: `ρ(e_a) f = ρ^i_a ∂f/∂x^i` and
    /// `[e_a, e_b] = C^c_{ab} e_c`.
    pub fn differential(&self) -> Result<KSection<T>> {
        let k = self.degree;
        if k > 2 {
            return Err(Error::DegreeTooHigh(k));
        }
        let r = self.chart.rank();
        let m = self.chart.base_dim();
        let out_sets = index_sets(r, k + 1);
        let plan: Arc<Vec<DiffTerms>> =
            Arc::new(out_sets.iter().map(|set| DiffTerms::new(set, r, &self.sets)).collect());
        let src = self.clone();
        let chart = self.chart.clone();
        let f: CoeffFn<T> = Arc::new(move |p: &[T]| {
            let (vals, grads) = src.jet(p)?;
            let anchor = chart.anchor_at(p)?;
            let structure = chart.structure_at(p)?;
            let out = plan
                .iter()
                .map(|terms| {
                    let mut acc = T::zero();
                    for &(sign, a, idx) in &terms.anchor {
                        let row = &anchor[a * m..(a + 1) * m];
                        let mut dir = T::zero();
                        for (rho, g) in row.iter().zip(&grads[idx]) {
                            dir = dir + *rho * *g;
                        }
                        acc = acc + T::lit(sign as f64) * dir;
                    }
                    for &(sign, a, b, c, idx) in &terms.bracket {
                        let cab = structure[(a * r + b) * r + c];
                        if cab != T::zero() {
                            acc = acc + T::lit(sign as f64) * cab * vals[idx];
                        }
                    }
                    acc
                })
                .collect();
            Ok(out)
        });
        KSection::derived(self.chart.clone(), k + 1, f)
    }

    /// `a·self + b·other` pointwise.
    pub fn combine(&self, a: T, other: &KSection<T>, b: T) -> Result<KSection<T>> {
        self.same_shape(other)?;
        let (s, t) = (self.clone(), other.clone());
        let f: CoeffFn<T> = Arc::new(move |p: &[T]| {
            let (u, v) = (s.values(p)?, t.values(p)?);
            Ok(u.into_iter().zip(v).map(|(x, y)| a * x + b * y).collect())
        });
        KSection::derived(self.chart.clone(), self.degree, f)
    }

    fn same_shape(&self, other: &KSection<T>) -> Result<()> {
        if self.degree != other.degree
            || self.chart.rank() != other.chart.rank()
            || self.chart.vars() != other.chart.vars()
        {
            return Err(Error::Dimension("sections live on different charts or degrees".into()));
        }
        Ok(())
    }

    /// Largest coefficient magnitude over the plan's sample points.
    pub fn max_abs(&self, plan: &SamplePlan) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in plan.points::<T, _>(self.chart.vars()) {
            worst = worst.max(max_abs(self.values(&p)?));
        }
        Ok(worst)
    }

    /// Largest coefficientwise deviation from `other` over the sample points.
    pub fn max_deviation(&self, other: &KSection<T>, plan: &SamplePlan) -> Result<f64> {
        self.same_shape(other)?;
        let mut worst: f64 = 0.0;
        for p in plan.points::<T, _>(self.chart.vars()) {
            let (u, v) = (self.values(&p)?, other.values(&p)?);
            worst = worst.max(max_abs(u.into_iter().zip(v).map(|(x, y)| x - y)));
        }
        Ok(worst)
    }
}

/// Precomputed terms of one output coefficient of the differential.
struct DiffTerms {
    /// `(sign, a, input coefficient)` for `ρ(e_a)` acting on a coefficient.
    anchor: Vec<(i32, usize, usize)>,
    /// `(sign, a, b, c, input coefficient)` for `C^c_{ab}` times a coefficient.
    bracket: Vec<(i32, usize, usize, usize, usize)>,
}

impl DiffTerms {
    fn new(set: &[usize], rank: usize, in_sets: &[Vec<usize>]) -> Self {
        let lookup = |v: &[usize]| in_sets.binary_search(&v.to_vec()).expect("index list enumerated");
        let without = |skip: &[usize]| -> Vec<usize> {
            set.iter()
                .enumerate()
                .filter(|(pos, _)| !skip.contains(pos))
                .map(|(_, &a)| a)
                .collect()
        };
        let mut anchor = Vec::new();
        for j in 0..set.len() {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            anchor.push((sign, set[j], lookup(&without(&[j]))));
        }
        let mut bracket = Vec::new();
        for j in 0..set.len() {
            for l in j + 1..set.len() {
                let sign = if (j + l) % 2 == 0 { 1 } else { -1 };
                let rest = without(&[j, l]);
                for c in 0..rank {
                    let mut args = vec![c];
                    args.extend_from_slice(&rest);
                    if let Some((sorted, s)) = sort_signed(&args) {
                        bracket.push((sign * s, set[j], set[l], c, lookup(&sorted)));
                    }
                }
            }
        }
        DiffTerms { anchor, bracket }
    }
}
