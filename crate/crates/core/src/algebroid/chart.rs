use crate::expr::{Bound, Expr};
use crate::{Error, Real, Result};

/// A Lie algebroid in one chart: base coordinates, anchor components
/// `ρ^i_a(x)` and structure functions `C^c_{ab}(x)` of the bracket
/// `[e_a, e_b] = C^c_{ab} e_c`.
///
/// Structure functions are stored in full (both `C^c_{ab}` and `C^c_{ba}`);
/// antisymmetry is a validated property, not an assumption.
#[derive(Debug, Clone)]
pub struct AlgebroidChart {
    vars: Vec<String>,
    rank: usize,
    anchor: Vec<Expr>,
    structure: Vec<Expr>,
    bound_anchor: Vec<Bound>,
    bound_structure: Vec<Bound>,
    nonzero_anchor: Vec<usize>,
    nonzero_structure: Vec<usize>,
}

impl AlgebroidChart {
    /// `anchor[a][i] = ρ^i_a`, `structure[a][b][c] = C^c_{ab}`.
    pub fn new(
        vars: Vec<String>,
        anchor: Vec<Vec<Expr>>,
        structure: Vec<Vec<Vec<Expr>>>,
    ) -> Result<Self> {
        let rank = anchor.len();
        let m = vars.len();
        if anchor.iter().any(|row| row.len() != m) {
            return Err(Error::Dimension(format!("anchor rows must have {m} entries")));
        }
        if structure.len() != rank
            || structure.iter().any(|s| s.len() != rank || s.iter().any(|t| t.len() != rank))
        {
            return Err(Error::Dimension(format!("structure array must be {rank}x{rank}x{rank}")));
        }
        let anchor: Vec<Expr> = anchor.into_iter().flatten().collect();
        let structure: Vec<Expr> = structure.into_iter().flatten().flatten().collect();
        let bind = |es: &[Expr]| -> Result<Vec<Bound>> {
            es.iter().map(|e| Bound::new(e, &vars).map_err(Error::from)).collect()
        };
        let bound_anchor = bind(&anchor)?;
        let bound_structure = bind(&structure)?;
        let nonzero = |es: &[Expr]| (0..es.len()).filter(|&k| !es[k].is_zero_literal()).collect();
        Ok(AlgebroidChart {
            nonzero_anchor: nonzero(&anchor),
            nonzero_structure: nonzero(&structure),
            vars,
            rank,
            anchor,
            structure,
            bound_anchor,
            bound_structure,
        })
    }

    /// Tangent algebroid of `R^dim`: identity anchor, zero bracket.
    pub fn tangent(vars: Vec<String>) -> Self {
        let m = vars.len();
        let anchor = (0..m)
            .map(|a| (0..m).map(|i| Expr::num(if a == i { 1.0 } else { 0.0 })).collect())
            .collect();
        let structure = vec![vec![vec![Expr::num(0.0); m]; m]; m];
        Self::new(vars, anchor, structure).expect("tangent chart is well formed")
    }

    /// A Lie algebra with constant structure constants `c[a][b][c]`, seen as an
    /// algebroid with zero anchor over the given base coordinates.
    pub fn lie_algebra(vars: Vec<String>, constants: &[Vec<Vec<f64>>]) -> Result<Self> {
        let r = constants.len();
        let anchor = vec![vec![Expr::num(0.0); vars.len()]; r];
        let structure = constants
            .iter()
            .map(|s| s.iter().map(|t| t.iter().map(|&c| Expr::num(c)).collect()).collect())
            .collect();
        Self::new(vars, anchor, structure)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn base_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `ρ^i_a`
    pub fn anchor_expr(&self, a: usize, i: usize) -> &Expr {
        &self.anchor[a * self.vars.len() + i]
    }

    /// `C^c_{ab}`
    pub fn structure_expr(&self, a: usize, b: usize, c: usize) -> &Expr {
        &self.structure[(a * self.rank + b) * self.rank + c]
    }

    /// Anchor matrix at `p`, row-major `[a * m + i]`.
    pub fn anchor_at<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.anchor.len()];
        for &k in &self.nonzero_anchor {
            out[k] = self.bound_anchor[k].value(p)?;
        }
        Ok(out)
    }

    /// Structure functions at `p`, indexed `[(a * r + b) * r + c]`.
    pub fn structure_at<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.structure.len()];
        for &k in &self.nonzero_structure {
            out[k] = self.bound_structure[k].value(p)?;
        }
        Ok(out)
    }

    /// Prolongation of this algebroid over a vector bundle with the given
    /// fiber coordinates.
    ///
    /// Coordinates are `vars ++ fiber_vars`; the basis is `ẽ_a` (anchor
    /// `ρ^i_a ∂/∂x^i`, brackets as in this chart) followed by `ē_k`
    /// (anchor `∂/∂y_k`, brackets zero). Over the dual bundle this is the
    /// `E`-tangent bundle `T^E E*`.
    pub fn prolongation(&self, fiber_vars: &[String]) -> Result<AlgebroidChart> {
        let m = self.base_dim();
        let k = fiber_vars.len();
        let r = self.rank;
        if let Some(clash) = fiber_vars.iter().find(|v| self.vars.contains(v)) {
            return Err(Error::Dimension(format!("fiber coordinate `{clash}` repeats a base coordinate")));
        }
        let vars: Vec<String> = self.vars.iter().chain(fiber_vars).cloned().collect();
        let zero = || Expr::num(0.0);
        let mut anchor = Vec::with_capacity(r + k);
        for a in 0..r {
            let mut row: Vec<Expr> = (0..m).map(|i| self.anchor_expr(a, i).clone()).collect();
            row.extend((0..k).map(|_| zero()));
            anchor.push(row);
        }
        for j in 0..k {
            let mut row = vec![zero(); m + k];
            row[m + j] = Expr::num(1.0);
            anchor.push(row);
        }
        let n = r + k;
        let mut structure = vec![vec![vec![zero(); n]; n]; n];
        for (a, plane) in structure.iter_mut().enumerate().take(r) {
            for (b, line) in plane.iter_mut().enumerate().take(r) {
                for (c, entry) in line.iter_mut().enumerate().take(r) {
                    *entry = self.structure_expr(a, b, c).clone();
                }
            }
        }
        AlgebroidChart::new(vars, anchor, structure)
    }
}
