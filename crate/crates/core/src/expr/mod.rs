//! Scalar expressions over named real variables.
//!
//! Every structure function, Hamiltonian and section coefficient in the crate is
//! an [`Expr`]. Expressions are parsed from text, printed back, evaluated in any
//! [`Real`](crate::Real) scalar, and differentiated either numerically exactly
//! (forward-mode dual numbers, see [`eval_with_partials`]) or symbolically
//! ([`Expr::partial`]) when a derivative has to be stored as an expression.

mod diff;
mod dual;
mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use dual::{Dual, Number};
pub use eval::{eval, eval_with_partials, Bound, Env, EvalError};
pub use parser::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of a scalar expression.
///
/// There is no node for parentheses: `(x)` parses to `Var("x")`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Arc<str>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(c: f64) -> Expr {
        Expr::Num(c)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// True for the literals `0` and `-0` (and `-(0)`), the only expressions
    /// recognised as structurally zero.
    pub fn is_zero_literal(&self) -> bool {
        match self {
            Expr::Num(c) => *c == 0.0,
            Expr::Neg(e) => e.is_zero_literal(),
            _ => false,
        }
    }

    /// Value of a literal exponent: `c` or `-c` with `c` a number.
    pub(crate) fn literal_value(&self) -> Option<f64> {
        match self {
            Expr::Num(c) => Some(*c),
            Expr::Neg(e) => e.literal_value().map(|c| -c),
            _ => None,
        }
    }

    /// Names of all variables referenced by the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.to_string());
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Replaces every occurrence of the named variables.
    pub fn substitute(&self, map: &[(&str, &Expr)]) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => map
                .iter()
                .find(|(name, _)| *name == &**v)
                .map(|(_, e)| (*e).clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Neg(e) => Expr::neg(e.substitute(map)),
            Expr::Call(f, e) => Expr::call(*f, e.substitute(map)),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.substitute(map), r.substitute(map)),
        }
    }

    /// Node count in preorder; used to locate subexpressions in error reports.
    pub(crate) fn nth_preorder(&self, n: usize) -> Option<&Expr> {
        fn walk<'a>(e: &'a Expr, n: usize, counter: &mut usize) -> Option<&'a Expr> {
            if *counter == n {
                return Some(e);
            }
            *counter += 1;
            match e {
                Expr::Num(_) | Expr::Var(_) => None,
                Expr::Neg(c) | Expr::Call(_, c) => walk(c, n, counter),
                Expr::Binary(_, l, r) => walk(l, n, counter).or_else(|| walk(r, n, counter)),
            }
        }
        walk(self, n, &mut 0)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if c.is_sign_negative() => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(c) => write!(f, "{c}")?,
            Expr::Var(v) => f.write_str(v)?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_at(f, 3)?;
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_at(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Binary(op, l, r) => {
                let (lp, rp) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                l.fmt_at(f, lp)?;
                if *op == BinOp::Pow {
                    f.write_str("^")?;
                } else {
                    write!(f, " {} ", op.symbol())?;
                }
                r.fmt_at(f, rp)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Prints with the minimal parentheses needed for the text to parse back to
/// the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Num(c)
    }
}

// Builders used when assembling structure data programmatically. They fold
// structural zeros and ones so that generated expressions stay small; user
// input is never rewritten.

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a.is_zero_literal(), b.is_zero_literal()) {
        (true, _) => b,
        (_, true) => a,
        _ => Expr::binary(BinOp::Add, a, b),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a.is_zero_literal(), b.is_zero_literal()) {
        (_, true) => a,
        (true, false) => negate(b),
        _ => Expr::binary(BinOp::Sub, a, b),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_zero_literal() || b.is_zero_literal() {
        return Expr::Num(0.0);
    }
    match (a.literal_value(), b.literal_value()) {
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => negate(b),
        (_, Some(y)) if y == -1.0 => negate(a),
        _ => Expr::binary(BinOp::Mul, a, b),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if a.is_zero_literal() {
        return Expr::Num(0.0);
    }
    Expr::binary(BinOp::Div, a, b)
}

pub(crate) fn negate(a: Expr) -> Expr {
    match a {
        Expr::Num(c) if c == 0.0 => Expr::Num(0.0),
        Expr::Neg(inner) => *inner,
        other => Expr::neg(other),
    }
}

/// Sum of the given terms, skipping structural zeros.
pub(crate) fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
    terms.into_iter().fold(Expr::Num(0.0), add)
}
