#![allow(dead_code)]

use std::path::PathBuf;

use lieaff::affgebroid::{AffgebroidChart, VStarSection};
use lieaff::expr::{parse, Expr};
use lieaff::models::{self, Model};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub const CORPUS_VARS: [&str; 3] = ["x", "y", "z"];

pub fn model_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn model_file(name: &str) -> PathBuf {
    model_dir().join(name)
}

/// The four built-in models used across the suite.
pub fn builtin_models() -> Vec<Model> {
    ["trivial:1", "trivial:1:oscillator", "linear:tangent2", "rigid:1,2,3"]
        .iter()
        .map(|n| models::by_name(n).unwrap())
        .collect()
}

/// Built-in models plus the shipped files with position-dependent anchors
/// and a nonzero `C0` block.
pub fn all_models() -> Vec<Model> {
    let mut out = builtin_models();
    for f in ["affine_action.toml", "rotation_action.toml"] {
        out.push(lieaff::modelfile::load_model(&model_file(f)).unwrap());
    }
    out
}

fn leaf(rng: &mut SplitMix64) -> String {
    if rng.random_bool(0.6) {
        CORPUS_VARS[rng.random_range(0..3)].to_string()
    } else {
        ["0.5", "1", "2", "3", "1.5", "0.25"][rng.random_range(0..6)].to_string()
    }
}

fn node(rng: &mut SplitMix64, depth: usize) -> String {
    if depth == 0 || rng.random_bool(0.2) {
        return leaf(rng);
    }
    let a = node(rng, depth - 1);
    match rng.random_range(0..16) {
        0 | 1 => format!("{a} + {}", node(rng, depth - 1)),
        2 => format!("({a}) - ({})", node(rng, depth - 1)),
        3 | 4 => format!("({a})*({})", node(rng, depth - 1)),
        5 => format!("({a})/(1 + ({})^2)", node(rng, depth - 1)),
        6 => format!("({a})^2"),
        7 => format!("({a})^3"),
        8 => format!("sin({a})"),
        9 => format!("cos({a})"),
        10 => format!("tan(0.3*sin({a}))"),
        11 => format!("exp(0.5*sin({a}))"),
        12 => format!("log(2 + ({a})^2)"),
        13 => format!("sqrt(1 + ({a})^2)"),
        14 => format!("-{a}"),
        _ => format!("(1.5 + sin({a}))^({})", leaf(rng)),
    }
}

/// Seeded corpus of expression sources over `x, y, z`, built so that every
/// point of `[-2, 2]^3` is inside the domain.
pub fn corpus(count: usize, seed: u64) -> Vec<String> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..count).map(|_| node(&mut rng, 4)).collect()
}

/// Polynomial of degree at most two in `vars` with coefficients in `[-1, 1]`.
pub fn random_polynomial(vars: &[String], rng: &mut SplitMix64) -> Expr {
    let mut terms = vec![format!("{:.6}", rng.random_range(-1.0..1.0))];
    for (i, v) in vars.iter().enumerate() {
        terms.push(format!("({:.6})*{v}", rng.random_range(-1.0..1.0)));
        for w in &vars[i..] {
            terms.push(format!("({:.6})*{v}*{w}", rng.random_range(-1.0..1.0)));
        }
    }
    parse(&terms.join(" + ")).unwrap()
}

pub fn random_gamma(chart: &std::sync::Arc<AffgebroidChart>, rng: &mut SplitMix64) -> VStarSection {
    let comps = (0..chart.affine_rank()).map(|_| random_polynomial(chart.vars(), rng)).collect();
    VStarSection::new(chart.clone(), comps).unwrap()
}

/// Central finite difference of `f` in coordinate `k`.
pub fn central_diff(f: impl Fn(&[f64]) -> f64, p: &[f64], k: usize, h: f64) -> f64 {
    let mut a = p.to_vec();
    let mut b = p.to_vec();
    a[k] += h;
    b[k] -= h;
    (f(&a) - f(&b)) / (2.0 * h)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
