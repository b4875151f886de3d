use std::fmt;
use std::sync::Arc;

use crate::algebroid::{validate_chart, AlgebroidChart, KSection, ValidationReport, VALIDITY_TOL};
use crate::expr::{negate, Bound, Expr};
use crate::sample::SamplePlan;
use crate::scalar::max_abs;
use crate::{Error, Real, Result};

/// A Lie affgebroid given by its bidual algebroid in a basis `{e_0, e_α}`
/// adapted to the cocycle `1_A` (`1_A(e_0) = 1`, `1_A(e_α) = 0`):
///
/// ```text
/// [e_0, e_α] = C^γ_{0α} e_γ     [e_α, e_β] = C^γ_{αβ} e_γ
/// ρ(e_0) = ρ^i_0 ∂/∂x^i         ρ(e_α) = ρ^i_α ∂/∂x^i
/// ```
///
/// Fiber coordinates `y_α` on `V*` are named by `fiber_vars`.
#[derive(Debug, Clone)]
pub struct AffgebroidChart {
    vars: Vec<String>,
    fiber_vars: Vec<String>,
    rho0: Vec<Expr>,
    rho_v: Vec<Vec<Expr>>,
    c0: Vec<Vec<Expr>>,
    cv: Vec<Vec<Vec<Expr>>>,
    bidual: Arc<AlgebroidChart>,
    vertical: Arc<AlgebroidChart>,
    prolongation: Arc<AlgebroidChart>,
}

impl AffgebroidChart {
    /// * `rho0[i] = ρ^i_0`
    /// * `rho_v[α][i] = ρ^i_α`
    /// * `c0[α][γ] = C^γ_{0α}`
    /// * `cv[α][β][γ] = C^γ_{αβ}`
    pub fn new(
        vars: Vec<String>,
        fiber_vars: Vec<String>,
        rho0: Vec<Expr>,
        rho_v: Vec<Vec<Expr>>,
        c0: Vec<Vec<Expr>>,
        cv: Vec<Vec<Vec<Expr>>>,
    ) -> Result<Self> {
        let m = vars.len();
        let n = fiber_vars.len();
        if rho0.len() != m {
            return Err(Error::Dimension(format!("rho0 needs {m} entries")));
        }
        if rho_v.len() != n || rho_v.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension(format!("rhoV must be {n}x{m}")));
        }
        if c0.len() != n || c0.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("C0 must be {n}x{n}")));
        }
        if cv.len() != n || cv.iter().any(|s| s.len() != n || s.iter().any(|t| t.len() != n)) {
            return Err(Error::Dimension(format!("CV must be {n}x{n}x{n}")));
        }
        let mut names: Vec<&String> = vars.iter().chain(&fiber_vars).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Dimension(format!("coordinate `{}` is declared twice", w[0])));
        }

        let zero = || Expr::num(0.0);
        let r = n + 1;
        let mut anchor = vec![rho0.clone()];
        anchor.extend(rho_v.iter().cloned());
        let mut structure = vec![vec![vec![zero(); r]; r]; r];
        for a in 0..n {
            for g in 0..n {
                structure[0][a + 1][g + 1] = c0[a][g].clone();
                structure[a + 1][0][g + 1] = negate(c0[a][g].clone());
                for b in 0..n {
                    structure[a + 1][b + 1][g + 1] = cv[a][b][g].clone();
                }
            }
        }
        let bidual = Arc::new(AlgebroidChart::new(vars.clone(), anchor, structure)?);
        let vertical = Arc::new(AlgebroidChart::new(vars.clone(), rho_v.clone(), cv.clone())?);
        let prolongation = Arc::new(bidual.prolongation(&fiber_vars)?);
        Ok(AffgebroidChart { vars, fiber_vars, rho0, rho_v, c0, cv, bidual, vertical, prolongation })
    }

    /// Fiber coordinates named `y1..yn`.
    pub fn default_fiber_vars(n: usize) -> Vec<String> {
        (1..=n).map(|k| format!("y{k}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn fiber_vars(&self) -> &[String] {
        &self.fiber_vars
    }

    /// Coordinates `(x, y)` of `V*`.
    pub fn phase_vars(&self) -> Vec<String> {
        self.vars.iter().chain(&self.fiber_vars).cloned().collect()
    }

    pub fn base_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn affine_rank(&self) -> usize {
        self.fiber_vars.len()
    }

    pub fn rho0(&self) -> &[Expr] {
        &self.rho0
    }

    pub fn rho_v(&self) -> &[Vec<Expr>] {
        &self.rho_v
    }

    pub fn c0(&self) -> &[Vec<Expr>] {
        &self.c0
    }

    pub fn cv(&self) -> &[Vec<Vec<Expr>>] {
        &self.cv
    }

    /// The bidual algebroid `Ã` of rank `n + 1`, basis index 0 being `e_0`.
    /// No bracket has an `e_0` component.
    pub fn bidual_chart(&self) -> Arc<AlgebroidChart> {
        self.bidual.clone()
    }

    /// The vertical subalgebroid `V`, spanned by `{e_α}`.
    pub fn vertical_chart(&self) -> Arc<AlgebroidChart> {
        self.vertical.clone()
    }

    /// The prolongation `T^Ã V*` over `(x, y)` with ordered basis
    /// `(ẽ_0, ẽ_1..ẽ_n, ē_1..ē_n)`.
    pub fn prolongation_chart(&self) -> Arc<AlgebroidChart> {
        self.prolongation.clone()
    }

    /// Name of the extra fiber coordinate `y_0` of `A^+`, chosen not to clash
    /// with any declared coordinate.
    pub fn y0_name(&self) -> String {
        let mut name = "y0".to_string();
        while self.vars.contains(&name) || self.fiber_vars.contains(&name) {
            name.insert(0, '_');
        }
        name
    }

    /// Fiber coordinates `(y_0, y_1..y_n)` of `A^+`.
    pub fn dual_fiber_vars(&self) -> Vec<String> {
        std::iter::once(self.y0_name()).chain(self.fiber_vars.iter().cloned()).collect()
    }

    /// The prolongation `T^Ã A^+` over `(x, y_0, y)`, ordered basis
    /// `(ẽ_0, ẽ_α, ē_0, ē_α)`; this is where the Liouville and canonical
    /// symplectic sections of `Ã` live.
    pub fn dual_prolongation_chart(&self) -> Result<Arc<AlgebroidChart>> {
        Ok(Arc::new(self.bidual.prolongation(&self.dual_fiber_vars())?))
    }

    /// Checks the lower-index antisymmetry of `CV`, the algebroid axioms of the
    /// bidual (which include the cocycle property of `1_A`) and `d e^0 = 0`.
    pub fn validate(&self, plan: &SamplePlan) -> Result<AffgebroidValidation> {
        let n = self.affine_rank();
        let mut cv_antisymmetry: f64 = 0.0;
        let bound: Vec<Vec<Vec<Bound>>> = self
            .cv
            .iter()
            .map(|s| s.iter().map(|t| t.iter().map(|e| Bound::new(e, &self.vars)).collect()).collect())
            .collect::<Result<_, _>>()?;
        for p in plan.points::<f64, _>(&self.vars) {
            for a in 0..n {
                for b in 0..n {
                    for g in 0..n {
                        let s = bound[a][b][g].value(&p)? + bound[b][a][g].value(&p)?;
                        cv_antisymmetry = cv_antisymmetry.max(s.abs());
                    }
                }
            }
        }
        let d_e0 = KSection::<f64>::basis(self.bidual.clone(), 0)?.differential()?.max_abs(plan)?;
        Ok(AffgebroidValidation {
            cv_antisymmetry,
            d_e0,
            bidual: validate_chart(&self.bidual, plan)?,
            vertical: validate_chart(&self.vertical, plan)?,
            prolongation: validate_chart(&self.prolongation, plan)?,
        })
    }

    pub(crate) fn anchor_and_structure<T: Real>(&self, x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        Ok((self.bidual.anchor_at(x)?, self.bidual.structure_at(x)?))
    }
}

/// Validation of an affgebroid chart and the algebroids built from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffgebroidValidation {
    pub cv_antisymmetry: f64,
    pub d_e0: f64,
    pub bidual: ValidationReport,
    pub vertical: ValidationReport,
    pub prolongation: ValidationReport,
}

impl AffgebroidValidation {
    pub fn is_valid(&self) -> bool {
        self.cv_antisymmetry <= 1e-10
            && self.d_e0 <= 1e-12
            && self.bidual.is_valid()
            && self.vertical.is_valid()
            && self.prolongation.is_valid()
    }

    /// Largest residual across every check.
    pub fn worst(&self) -> f64 {
        max_abs([
            self.cv_antisymmetry,
            self.d_e0,
            self.bidual.antisymmetry,
            self.bidual.anchor,
            self.bidual.jacobi,
            self.vertical.antisymmetry,
            self.vertical.anchor,
            self.vertical.jacobi,
            self.prolongation.antisymmetry,
            self.prolongation.anchor,
            self.prolongation.jacobi,
        ])
    }
}

impl fmt::Display for AffgebroidValidation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cv_antisymmetry = {:.6e}", self.cv_antisymmetry)?;
        writeln!(f, "d_e0 = {:.6e}", self.d_e0)?;
        f.write_str(&self.bidual.lines("bidual."))?;
        f.write_str(&self.vertical.lines("vertical."))?;
        f.write_str(&self.prolongation.lines("prolongation."))?;
        writeln!(f, "tolerance = {VALIDITY_TOL:e}")?;
        writeln!(f, "valid = {}", self.is_valid())
    }
}
