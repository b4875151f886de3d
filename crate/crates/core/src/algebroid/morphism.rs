use std::sync::Arc;

use super::{AlgebroidChart, CoeffFn, KSection};
use crate::expr::{Bound, Expr};
use crate::{Error, Real, Result};

/// A vector bundle map `(F, f)` from the bundle of `src` to that of `dst`,
/// given in coordinates: `f` as one expression per destination coordinate and
/// `F(e_a) = F^b_a e'_b` as a `dst.rank() × src.rank()` matrix, all in the
/// source coordinates.
#[derive(Debug, Clone)]
pub struct Morphism {
    src: Arc<AlgebroidChart>,
    dst: Arc<AlgebroidChart>,
    base_map: Vec<Bound>,
    fiber_map: Vec<Bound>,
    nonzero_fiber: Vec<usize>,
}

impl Morphism {
    pub fn new(
        src: Arc<AlgebroidChart>,
        dst: Arc<AlgebroidChart>,
        base_map: Vec<Expr>,
        fiber_map: Vec<Vec<Expr>>,
    ) -> Result<Self> {
        if base_map.len() != dst.base_dim() {
            return Err(Error::Dimension(format!(
                "base map has {} components, destination base has dimension {}",
                base_map.len(),
                dst.base_dim()
            )));
        }
        if fiber_map.len() != dst.rank() || fiber_map.iter().any(|row| row.len() != src.rank()) {
            return Err(Error::Dimension(format!(
                "fiber map must be {}x{}",
                dst.rank(),
                src.rank()
            )));
        }
        let bind = |e: &Expr| Bound::new(e, src.vars()).map_err(Error::from);
        let base_map = base_map.iter().map(bind).collect::<Result<Vec<_>>>()?;
        let flat: Vec<Expr> = fiber_map.into_iter().flatten().collect();
        let nonzero_fiber = (0..flat.len()).filter(|&k| !flat[k].is_zero_literal()).collect();
        let fiber_map = flat.iter().map(bind).collect::<Result<Vec<_>>>()?;
        Ok(Morphism { src, dst, base_map, fiber_map, nonzero_fiber })
    }

    /// Identity of a chart.
    pub fn identity(chart: Arc<AlgebroidChart>) -> Self {
        let base = chart.vars().iter().map(|v| Expr::var(v)).collect();
        let r = chart.rank();
        let fiber = (0..r)
            .map(|b| (0..r).map(|a| Expr::num(if a == b { 1.0 } else { 0.0 })).collect())
            .collect();
        Morphism::new(chart.clone(), chart, base, fiber).expect("identity is well formed")
    }

    pub fn src(&self) -> &Arc<AlgebroidChart> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<AlgebroidChart> {
        &self.dst
    }

    fn image_point<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        self.base_map.iter().map(|b| b.value(p).map_err(Error::from)).collect()
    }

    /// Fiber matrix at `p`, row-major `[b * src_rank + a] = F^b_a`.
    fn matrix<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.fiber_map.len()];
        for &k in &self.nonzero_fiber {
            out[k] = self.fiber_map[k].value(p)?;
        }
        Ok(out)
    }

    /// `((F,f)^*φ)_x(a_1,…,a_k) = φ_{f(x)}(F a_1,…,F a_k)`.
    ///
    /// On basis sections the coefficient on `I` is `Σ_J φ_J(f(x)) det F[J, I]`.
    pub fn pullback<T: Real>(&self, s: &KSection<T>) -> Result<KSection<T>> {
        let same_chart = s.chart().rank() == self.dst.rank() && s.chart().vars() == self.dst.vars();
        if !same_chart {
            return Err(Error::Dimension("section does not live on the morphism's target".into()));
        }
        let k = s.degree();
        if k > 2 {
            return Err(Error::DegreeTooHigh(k));
        }
        let src_sets: Vec<Vec<usize>> = super::index_sets(self.src.rank(), k);
        let dst_sets: Vec<Vec<usize>> = s.index_sets().to_vec();
        let this = self.clone();
        let section = s.clone();
        let n_src = self.src.rank();
        let f: CoeffFn<T> = Arc::new(move |p: &[T]| {
            let q = this.image_point(p)?;
            let phi = section.values(&q)?;
            let fm = this.matrix(p)?;
            let entry = |b: usize, a: usize| fm[b * n_src + a];
            let out = src_sets
                .iter()
                .map(|cols| {
                    let mut acc = T::zero();
                    for (rows, &v) in dst_sets.iter().zip(&phi) {
                        if v == T::zero() {
                            continue;
                        }
                        let minor = match k {
                            0 => T::one(),
                            1 => entry(rows[0], cols[0]),
                            _ => {
                                entry(rows[0], cols[0]) * entry(rows[1], cols[1])
                                    - entry(rows[0], cols[1]) * entry(rows[1], cols[0])
                            }
                        };
                        acc = acc + v * minor;
                    }
                    acc
                })
                .collect();
            Ok(out)
        });
        KSection::derived(self.src.clone(), k, f)
    }
}

/// Free-function form of [`Morphism::pullback`].
pub fn pullback<T: Real>(
    src: Arc<AlgebroidChart>,
    dst: Arc<AlgebroidChart>,
    base_map: Vec<Expr>,
    fiber_map: Vec<Vec<Expr>>,
    s: &KSection<T>,
) -> Result<KSection<T>> {
    Morphism::new(src, dst, base_map, fiber_map)?.pullback(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::sample::SamplePlan;

    fn plane() -> Arc<AlgebroidChart> {
        Arc::new(AlgebroidChart::tangent(vec!["x1".into(), "x2".into()]))
    }

    #[test]
    fn identity_pullback_is_identity() {
        let chart = plane();
        let s = KSection::<f64>::one_form(chart.clone(), vec![parse("x1^2").unwrap(), parse("sin(x2)").unwrap()])
            .unwrap();
        let back = Morphism::identity(chart).pullback(&s).unwrap();
        assert_eq!(back.max_deviation(&s, &SamplePlan::default()).unwrap(), 0.0);
    }

    #[test]
    fn doubling_fiber_map_doubles_one_forms() {
        let chart = plane();
        let base = vec![Expr::var("x1"), Expr::var("x2")];
        let fiber = vec![
            vec![Expr::num(2.0), Expr::num(0.0)],
            vec![Expr::num(0.0), Expr::num(2.0)],
        ];
        let s = KSection::<f64>::one_form(chart.clone(), vec![parse("x1*x2").unwrap(), parse("1").unwrap()])
            .unwrap();
        let back = pullback(chart.clone(), chart.clone(), base, fiber, &s).unwrap();
        let doubled = s.combine(2.0, &s, 0.0).unwrap();
        assert!(back.max_deviation(&doubled, &SamplePlan::default()).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let chart = plane();
        let err = Morphism::new(chart.clone(), chart, vec![Expr::var("x1")], vec![]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn diffeomorphism_pullback_commutes_with_d() {
        // (x1, x2) ↦ (x1 + x2^2, x2) with its tangent map is a morphism of TR^2.
        let chart = plane();
        let base = vec![parse("x1 + x2^2").unwrap(), Expr::var("x2")];
        let fiber = vec![
            vec![Expr::num(1.0), parse("2*x2").unwrap()],
            vec![Expr::num(0.0), Expr::num(1.0)],
        ];
        let m = Morphism::new(chart.clone(), chart.clone(), base, fiber).unwrap();
        let theta = KSection::<f64>::one_form(
            chart,
            vec![parse("x1*x2").unwrap(), parse("cos(x1)").unwrap()],
        )
        .unwrap();
        let lhs = m.pullback(&theta).unwrap().differential().unwrap();
        let rhs = m.pullback(&theta.differential().unwrap()).unwrap();
        assert!(lhs.max_deviation(&rhs, &SamplePlan::default()).unwrap() < 1e-8);
    }
}
