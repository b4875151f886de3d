//! Deterministic sample points for pointwise checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::Real;

pub const DEFAULT_BOX: (f64, f64) = (-1.0, 1.0);
pub const DEFAULT_COUNT: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

/// Axis-aligned sampling box plus point count and seed.
///
/// Boxes are keyed by variable name; a variable without an entry uses
/// `default_box`. The same plan therefore serves charts over different
/// coordinate lists (a base, its dual bundle, a prolongation).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub boxes: BTreeMap<String, (f64, f64)>,
    pub default_box: (f64, f64),
    pub count: usize,
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            boxes: BTreeMap::new(),
            default_box: DEFAULT_BOX,
            count: DEFAULT_COUNT,
            seed: DEFAULT_SEED,
        }
    }
}

impl SamplePlan {
    pub fn with_box(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.boxes.insert(var.to_string(), (lo, hi));
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn range(&self, var: &str) -> (f64, f64) {
        self.boxes.get(var).copied().unwrap_or(self.default_box)
    }

    /// `count` points for the given coordinate list. Identical inputs always
    /// give bit-identical points.
    pub fn points<T: Real, S: AsRef<str>>(&self, vars: &[S]) -> Vec<Vec<T>> {
        let mut rng = SplitMix64::seed_from_u64(self.seed);
        let ranges: Vec<(f64, f64)> = vars.iter().map(|v| self.range(v.as_ref())).collect();
        (0..self.count)
            .map(|_| {
                ranges
                    .iter()
                    .map(|&(lo, hi)| {
                        let u: f64 = rng.random();
                        T::lit(lo + (hi - lo) * u)
                    })
                    .collect()
            })
            .collect()
    }
}
