//! The TOML model file format.
//!
//! ```toml
//! [space]
//! m = 1
//! n = 3
//! vars = ["t"]
//! fiber_vars = ["Pi1", "Pi2", "Pi3"]   # optional, default y1..yn
//!
//! [anchor]
//! rho0 = ["1"]                         # ρ^i_0
//! rhoV = [["0"], ["0"], ["0"]]         # rhoV[α][i] = ρ^i_α
//!
//! [structure]
//! C0 = [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]]   # C0[α][γ] = C^γ_{0α}
//! CV = { "1,2,3" = "1", "2,3,1" = "1", "3,1,2" = "1" }      # "α,β,γ" = C^γ_{αβ}
//!
//! [hamiltonian]
//! H = "Pi1^2/2 + Pi2^2/4 + Pi3^2/6"
//!
//! [sections.drift]
//! alpha0 = "t"
//! alphaV = ["0", "0", "0"]
//!
//! [sections.exact]
//! W = "t^2/2"                          # α = d^Ã W
//!
//! [sampling]
//! count = 100
//! seed = 42
//! box = { t = [0, 2] }
//! x0_box = { t = [0, 0] }
//! ```
//!
//! Indices in `CV` are 1-based; the entry for `β,α,γ` is filled in as the
//! negative of `α,β,γ`. `C0` and `[sampling]` may be omitted, as may
//! `[structure]` altogether. Expressions may be written as strings or bare
//! numbers.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::affgebroid::{AffgebroidChart, CoSection, HamiltonianSection};
use crate::expr::{negate, parse, Expr};
use crate::models::Model;
use crate::sample::SamplePlan;
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ExprField {
    Num(f64),
    Text(String),
}

impl ExprField {
    fn to_expr(&self, what: &str) -> Result<Expr> {
        match self {
            ExprField::Num(v) => Ok(Expr::num(*v)),
            ExprField::Text(s) => parse(s).map_err(|e| Error::Model(format!("{what}: {e}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpace {
    m: usize,
    n: usize,
    vars: Vec<String>,
    fiber_vars: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileAnchor {
    rho0: Vec<ExprField>,
    #[serde(rename = "rhoV")]
    rho_v: Vec<Vec<ExprField>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileStructure {
    #[serde(rename = "C0")]
    c0: Option<Vec<Vec<ExprField>>>,
    #[serde(rename = "CV", default)]
    cv: BTreeMap<String, ExprField>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileHamiltonian {
    #[serde(rename = "H")]
    h: ExprField,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSection {
    alpha0: Option<ExprField>,
    #[serde(rename = "alphaV")]
    alpha_v: Option<Vec<ExprField>>,
    #[serde(rename = "W")]
    w: Option<ExprField>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSampling {
    count: Option<usize>,
    seed: Option<u64>,
    #[serde(rename = "box", default)]
    boxes: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    x0_box: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    space: FileSpace,
    anchor: FileAnchor,
    #[serde(default)]
    structure: FileStructure,
    hamiltonian: FileHamiltonian,
    #[serde(default)]
    sections: BTreeMap<String, FileSection>,
    #[serde(default)]
    sampling: FileSampling,
}

fn exprs(fields: &[ExprField], what: &str) -> Result<Vec<Expr>> {
    fields.iter().enumerate().map(|(k, f)| f.to_expr(&format!("{what}[{}]", k + 1))).collect()
}

fn parse_triple(key: &str, n: usize) -> Result<[usize; 3]> {
    let bad = || Error::Model(format!("CV key `{key}` must be three indices in 1..={n} like \"1,2,3\""));
    let parts: Vec<usize> = key
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let triple: [usize; 3] = parts.try_into().map_err(|_| bad())?;
    if triple.iter().any(|&k| k == 0 || k > n) {
        return Err(bad());
    }
    Ok(triple.map(|k| k - 1))
}

fn boxes(raw: &BTreeMap<String, [f64; 2]>, known: &[String]) -> Result<BTreeMap<String, (f64, f64)>> {
    raw.iter()
        .map(|(k, [lo, hi])| {
            if !known.contains(k) {
                return Err(Error::Model(format!("sampling box for unknown variable `{k}`")));
            }
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Model(format!("sampling box for `{k}` must satisfy lo <= hi")));
            }
            Ok((k.clone(), (*lo, *hi)))
        })
        .collect()
}

/// Parses a model from TOML text; `name` labels it in reports.
pub fn parse_model(text: &str, name: &str) -> Result<Model> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
    let FileSpace { m, n, vars, fiber_vars } = file.space;
    if vars.len() != m {
        return Err(Error::Model(format!("space.vars lists {} names but m = {m}", vars.len())));
    }
    let fiber_vars = fiber_vars.unwrap_or_else(|| AffgebroidChart::default_fiber_vars(n));
    if fiber_vars.len() != n {
        return Err(Error::Model(format!("space.fiber_vars lists {} names but n = {n}", fiber_vars.len())));
    }
    for v in vars.iter().chain(&fiber_vars) {
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::Model(format!("`{v}` is not a valid variable name")));
        }
    }

    let rho0 = exprs(&file.anchor.rho0, "rho0")?;
    let rho_v = file
        .anchor
        .rho_v
        .iter()
        .enumerate()
        .map(|(a, row)| exprs(row, &format!("rhoV[{}]", a + 1)))
        .collect::<Result<Vec<_>>>()?;

    let zero = || Expr::num(0.0);
    let c0 = match &file.structure.c0 {
        None => vec![vec![zero(); n]; n],
        Some(rows) => rows
            .iter()
            .enumerate()
            .map(|(a, row)| exprs(row, &format!("C0[{}]", a + 1)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut cv = vec![vec![vec![zero(); n]; n]; n];
    let mut given = vec![vec![vec![false; n]; n]; n];
    for (key, field) in &file.structure.cv {
        let [a, b, c] = parse_triple(key, n)?;
        let e = field.to_expr(&format!("CV[{key}]"))?;
        if a == b {
            if !e.is_zero_literal() {
                return Err(Error::Model(format!("CV[{key}] must vanish: the bracket is antisymmetric")));
            }
            continue;
        }
        if given[a][b][c] || given[b][a][c] {
            return Err(Error::Model(format!("CV entry for `{key}` is given twice (directly or by antisymmetry)")));
        }
        given[a][b][c] = true;
        cv[b][a][c] = negate(e.clone());
        cv[a][b][c] = e;
    }

    let chart = Arc::new(AffgebroidChart::new(vars.clone(), fiber_vars.clone(), rho0, rho_v, c0, cv)?);
    let hamiltonian = HamiltonianSection::new(chart.clone(), file.hamiltonian.h.to_expr("H")?)?;

    let mut sections = BTreeMap::new();
    for (sname, s) in &file.sections {
        let section = match (&s.alpha0, &s.alpha_v, &s.w) {
            (None, None, Some(w)) => CoSection::exact(chart.clone(), &w.to_expr(&format!("sections.{sname}.W"))?)?,
            (a0, Some(av), None) => {
                let a0 = match a0 {
                    Some(e) => e.to_expr(&format!("sections.{sname}.alpha0"))?,
                    None => zero(),
                };
                CoSection::new(chart.clone(), a0, exprs(av, &format!("sections.{sname}.alphaV"))?)?
            }
            _ => {
                return Err(Error::Model(format!(
                    "section `{sname}` needs either W or alphaV (with optional alpha0)"
                )))
            }
        };
        sections.insert(sname.clone(), section);
    }

    let sampling = file.sampling;
    let mut plan = SamplePlan { boxes: boxes(&sampling.boxes, &chart.phase_vars())?, ..SamplePlan::default() };
    if let Some(count) = sampling.count {
        plan.count = count;
    }
    if let Some(seed) = sampling.seed {
        plan.seed = seed;
    }
    Ok(Model {
        name: name.to_string(),
        chart: chart.clone(),
        hamiltonian,
        sections,
        plan,
        x0_boxes: boxes(&sampling.x0_box, &vars)?,
    })
}

/// Reads and parses a model file.
pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().map_or_else(|| "model".to_string(), |s| s.to_string_lossy().into_owned());
    parse_model(&text, &name)
}

/// A section named in the model, or an inline one: `W=<expr>` for an exact
/// section, or `<alpha0>;<alpha1>,…,<alphan>`.
pub fn resolve_section(model: &Model, spec: &str) -> Result<CoSection> {
    if let Some(w) = spec.strip_prefix("W=") {
        return CoSection::exact(model.chart.clone(), &parse(w)?);
    }
    if let Some((a0, av)) = spec.split_once(';') {
        let av = av.split(',').map(|s| parse(s).map_err(Error::from)).collect::<Result<Vec<_>>>()?;
        return CoSection::new(model.chart.clone(), parse(a0)?, av);
    }
    model.section(spec).cloned()
}
