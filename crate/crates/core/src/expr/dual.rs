//! Forward-mode dual numbers with a dynamic number of infinitesimal parts.

use crate::Real;

/// Arithmetic needed by the expression evaluator.
///
/// Implemented for plain scalars and for [`Dual`], so a single evaluator
/// produces either values or values with first partials.
pub trait Number: Clone {
    type Scalar: Real;

    fn constant(c: f64) -> Self;
    /// Real part, used for domain checks.
    fn re(&self) -> Self::Scalar;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn quot(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    /// `self^c` for a literal exponent; callers rule out `0^negative`.
    fn powc(&self, c: f64) -> Self;
    fn sine(&self) -> Self;
    fn cosine(&self) -> Self;
    fn tangent(&self) -> Self;
    fn exponential(&self) -> Self;
    fn logarithm(&self) -> Self;
    fn square_root(&self) -> Self;
}

macro_rules! impl_number_for_real {
    ($t:ty) => {
        impl Number for $t {
            type Scalar = $t;

            fn constant(c: f64) -> Self {
                <$t as Real>::lit(c)
            }
            fn re(&self) -> $t {
                *self
            }
            fn plus(&self, o: &Self) -> Self {
                self + o
            }
            fn minus(&self, o: &Self) -> Self {
                self - o
            }
            fn times(&self, o: &Self) -> Self {
                self * o
            }
            fn quot(&self, o: &Self) -> Self {
                self / o
            }
            fn negated(&self) -> Self {
                -self
            }
            fn powc(&self, c: f64) -> Self {
                if c == 0.0 {
                    1.0
                } else {
                    <$t>::powf(*self, c as $t)
                }
            }
            fn sine(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cosine(&self) -> Self {
                <$t>::cos(*self)
            }
            fn tangent(&self) -> Self {
                <$t>::tan(*self)
            }
            fn exponential(&self) -> Self {
                <$t>::exp(*self)
            }
            fn logarithm(&self) -> Self {
                <$t>::ln(*self)
            }
            fn square_root(&self) -> Self {
                <$t>::sqrt(*self)
            }
        }
    };
}

impl_number_for_real!(f32);
impl_number_for_real!(f64);

/// `re + Σ eps[k] ε_k` with `ε_j ε_k = 0`.
///
/// A shorter `eps` vector is implicitly zero-padded, so constants carry no
/// allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: Vec<T>,
}

impl<T: Real> Dual<T> {
    pub fn new(re: T, eps: Vec<T>) -> Self {
        Dual { re, eps }
    }

    /// Seeds variable `slot` of `n` tracked directions.
    pub fn variable(re: T, slot: usize, n: usize) -> Self {
        let mut eps = vec![T::zero(); n];
        eps[slot] = T::one();
        Dual { re, eps }
    }

    /// Partial along direction `k`.
    pub fn partial(&self, k: usize) -> T {
        self.eps.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Chain rule for a unary function with value `f` and derivative `df`.
    fn chain(&self, f: T, df: T) -> Self {
        Dual { re: f, eps: self.eps.iter().map(|&e| e * df).collect() }
    }

    fn zip(&self, o: &Self, f: impl Fn(T, T) -> T) -> Vec<T> {
        let n = self.eps.len().max(o.eps.len());
        (0..n).map(|k| f(self.partial(k), o.partial(k))).collect()
    }
}

impl<T: Real> Number for Dual<T> {
    type Scalar = T;

    fn constant(c: f64) -> Self {
        Dual { re: T::lit(c), eps: Vec::new() }
    }
    fn re(&self) -> T {
        self.re
    }
    fn plus(&self, o: &Self) -> Self {
        Dual { re: self.re + o.re, eps: self.zip(o, |a, b| a + b) }
    }
    fn minus(&self, o: &Self) -> Self {
        Dual { re: self.re - o.re, eps: self.zip(o, |a, b| a - b) }
    }
    fn times(&self, o: &Self) -> Self {
        let (a, b) = (self.re, o.re);
        Dual { re: a * b, eps: self.zip(o, |da, db| da * b + a * db) }
    }
    fn quot(&self, o: &Self) -> Self {
        let (a, b) = (self.re, o.re);
        let b2 = b * b;
        Dual { re: a / b, eps: self.zip(o, |da, db| (da * b - a * db) / b2) }
    }
    fn negated(&self) -> Self {
        Dual { re: -self.re, eps: self.eps.iter().map(|&e| -e).collect() }
    }
    fn powc(&self, c: f64) -> Self {
        if c == 0.0 {
            return Dual { re: T::one(), eps: vec![T::zero(); self.eps.len()] };
        }
        let u = self.re;
        let value = Number::powc(&u, c);
        let slope = T::lit(c) * Number::powc(&u, c - 1.0);
        self.chain(value, slope)
    }
    fn sine(&self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cosine(&self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn tangent(&self) -> Self {
        let c = self.re.cos();
        self.chain(self.re.tan(), T::one() / (c * c))
    }
    fn exponential(&self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn logarithm(&self) -> Self {
        self.chain(self.re.ln(), T::one() / self.re)
    }
    fn square_root(&self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::one() / (T::lit(2.0) * s))
    }
}
