use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::dual::{Dual, Number};
use super::{BinOp, Expr, Func};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain violation ({what}) in `{subexpr}`")]
    Domain { what: &'static str, subexpr: String },
}

/// Variable bindings for [`eval`].
pub type Env = BTreeMap<String, f64>;

/// Expression tree with variables resolved to slots of a point slice.
#[derive(Debug)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>, u32),
    PowLit(Box<Node>, f64, u32),
    Call(Func, Box<Node>, u32),
}

/// An [`Expr`] bound to an ordered variable list, ready for repeated
/// evaluation at points given as slices in that order.
#[derive(Debug, Clone)]
pub struct Bound {
    expr: Arc<Expr>,
    node: Arc<Node>,
    arity: usize,
}

impl Bound {
    /// Resolves every variable of `expr` against `vars`.
    pub fn new<S: AsRef<str>>(expr: &Expr, vars: &[S]) -> Result<Bound, EvalError> {
        let mut counter = 0u32;
        let node = bind(expr, vars, &mut counter)?;
        Ok(Bound { expr: Arc::new(expr.clone()), node: Arc::new(node), arity: vars.len() })
    }

    pub fn constant(c: f64) -> Bound {
        Bound { expr: Arc::new(Expr::Num(c)), node: Arc::new(Node::Num(c)), arity: 0 }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero_literal()
    }

    fn locate(&self, (id, what): (u32, &'static str)) -> EvalError {
        let subexpr = self
            .expr
            .nth_preorder(id as usize)
            .map(|e| e.to_string())
            .unwrap_or_else(|| self.expr.to_string());
        EvalError::Domain { what, subexpr }
    }

    pub fn value<T: Real>(&self, point: &[T]) -> Result<T, EvalError> {
        debug_assert!(point.len() >= self.arity);
        eval_node(&self.node, &|k| point[k]).map_err(|e| self.locate(e))
    }

    /// Value and the full gradient with respect to every slot of `point`.
    pub fn value_grad<T: Real>(&self, point: &[T]) -> Result<(T, Vec<T>), EvalError> {
        let n = point.len();
        if let Node::Num(c) = *self.node {
            return Ok((T::lit(c), vec![T::zero(); n]));
        }
        let d: Dual<T> = eval_node(&self.node, &|k| Dual::variable(point[k], k, n))
            .map_err(|e| self.locate(e))?;
        let grad = (0..n).map(|k| d.partial(k)).collect();
        Ok((d.re, grad))
    }

    /// Value and partials with respect to the listed slots only.
    pub fn value_partials<T: Real>(
        &self,
        point: &[T],
        wrt: &[usize],
    ) -> Result<(T, Vec<T>), EvalError> {
        let n = wrt.len();
        let d: Dual<T> = eval_node(&self.node, &|k| match wrt.iter().position(|&w| w == k) {
            Some(slot) => Dual::variable(point[k], slot, n),
            None => Dual::new(point[k], Vec::new()),
        })
        .map_err(|e| self.locate(e))?;
        Ok((d.re, (0..n).map(|k| d.partial(k)).collect()))
    }
}

fn bind<S: AsRef<str>>(e: &Expr, vars: &[S], counter: &mut u32) -> Result<Node, EvalError> {
    let id = *counter;
    *counter += 1;
    Ok(match e {
        Expr::Num(c) => Node::Num(*c),
        Expr::Var(name) => {
            let slot = vars
                .iter()
                .position(|v| v.as_ref() == &**name)
                .ok_or_else(|| EvalError::Unbound(name.to_string()))?;
            Node::Var(slot)
        }
        Expr::Neg(inner) => Node::Neg(Box::new(bind(inner, vars, counter)?)),
        Expr::Call(f, arg) => Node::Call(*f, Box::new(bind(arg, vars, counter)?), id),
        Expr::Binary(BinOp::Pow, base, exponent) if exponent.literal_value().is_some() => {
            let base = bind(base, vars, counter)?;
            // keep the preorder numbering aligned with the source tree
            bind(exponent, vars, counter)?;
            Node::PowLit(Box::new(base), exponent.literal_value().unwrap_or_default(), id)
        }
        Expr::Binary(op, l, r) => {
            let l = bind(l, vars, counter)?;
            let r = bind(r, vars, counter)?;
            Node::Bin(*op, Box::new(l), Box::new(r), id)
        }
    })
}

type NodeError = (u32, &'static str);

fn eval_node<N: Number>(node: &Node, var: &dyn Fn(usize) -> N) -> Result<N, NodeError> {
    let zero = <N::Scalar as num_traits::Zero>::zero();
    Ok(match node {
        Node::Num(c) => N::constant(*c),
        Node::Var(k) => var(*k),
        Node::Neg(inner) => eval_node(inner, var)?.negated(),
        Node::Call(f, arg, id) => {
            let u = eval_node(arg, var)?;
            let re = u.re();
            match f {
                Func::Sin => u.sine(),
                Func::Cos => u.cosine(),
                Func::Tan => {
                    if num_traits::Float::cos(re) == zero {
                        return Err((*id, "tan at a pole"));
                    }
                    u.tangent()
                }
                Func::Exp => u.exponential(),
                Func::Log => {
                    if re <= zero {
                        return Err((*id, "log of a non-positive value"));
                    }
                    u.logarithm()
                }
                Func::Sqrt => {
                    if re < zero {
                        return Err((*id, "sqrt of a negative value"));
                    }
                    u.square_root()
                }
            }
        }
        Node::PowLit(base, c, id) => {
            let u = eval_node(base, var)?;
            let re = u.re();
            if re == zero && *c < 0.0 {
                return Err((*id, "zero raised to a negative power"));
            }
            if re < zero && c.fract() != 0.0 {
                return Err((*id, "negative base with a fractional exponent"));
            }
            u.powc(*c)
        }
        Node::Bin(op, l, r, id) => {
            let a = eval_node(l, var)?;
            let b = eval_node(r, var)?;
            match op {
                BinOp::Add => a.plus(&b),
                BinOp::Sub => a.minus(&b),
                BinOp::Mul => a.times(&b),
                BinOp::Div => {
                    if b.re() == zero {
                        return Err((*id, "division by zero"));
                    }
                    a.quot(&b)
                }
                BinOp::Pow => {
                    if a.re() <= zero {
                        return Err((*id, "non-literal exponent needs a positive base"));
                    }
                    b.times(&a.logarithm()).exponential()
                }
            }
        }
    })
}

/// Evaluates `e` with the bindings in `env`.
pub fn eval(e: &Expr, env: &Env) -> Result<f64, EvalError> {
    let names: Vec<&str> = env.keys().map(String::as_str).collect();
    let values: Vec<f64> = env.values().copied().collect();
    Bound::new(e, &names)?.value(&values)
}

/// Value of `e` and its exact first partials with respect to `wrt`.
pub fn eval_with_partials(e: &Expr, env: &Env, wrt: &[&str]) -> Result<(f64, Vec<f64>), EvalError> {
    let names: Vec<&str> = env.keys().map(String::as_str).collect();
    let values: Vec<f64> = env.values().copied().collect();
    let bound = Bound::new(e, &names)?;
    let mut slots = Vec::with_capacity(wrt.len());
    for w in wrt {
        match names.iter().position(|n| n == w) {
            Some(k) => slots.push(k),
            None => return Err(EvalError::Unbound((*w).to_string())),
        }
    }
    bound.value_partials(&values, &slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn env(pairs: &[(&str, f64)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn evaluates_basic_expressions() {
        let e = parse("x+2*y").unwrap();
        assert_eq!(eval(&e, &env(&[("x", 1.0), ("y", 3.0)])).unwrap(), 7.0);
        assert_eq!(eval(&parse("exp(0)").unwrap(), &Env::new()).unwrap(), 1.0);
        assert_eq!(eval(&parse("sin(x)*cos(x)").unwrap(), &env(&[("x", 0.0)])).unwrap(), 0.0);
    }

    #[test]
    fn domain_violations_name_the_subexpression() {
        let err = eval(&parse("1 + log(x)").unwrap(), &env(&[("x", -1.0)])).unwrap_err();
        assert_eq!(
            err,
            EvalError::Domain { what: "log of a non-positive value", subexpr: "log(x)".into() }
        );
        let err = eval(&parse("y/(x-x)").unwrap(), &env(&[("x", 2.0), ("y", 1.0)])).unwrap_err();
        assert!(matches!(err, EvalError::Domain { what: "division by zero", .. }));
        let err = eval(&parse("sqrt(x)").unwrap(), &env(&[("x", -0.5)])).unwrap_err();
        assert!(matches!(err, EvalError::Domain { .. }));
        let err = eval(&parse("x^-1").unwrap(), &env(&[("x", 0.0)])).unwrap_err();
        assert!(matches!(err, EvalError::Domain { what: "zero raised to a negative power", .. }));
        let err = eval(&parse("x^y").unwrap(), &env(&[("x", -2.0), ("y", 2.0)])).unwrap_err();
        assert!(matches!(err, EvalError::Domain { .. }));
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let err = eval(&parse("x + z").unwrap(), &env(&[("x", 1.0)])).unwrap_err();
        assert_eq!(err, EvalError::Unbound("z".into()));
    }

    #[test]
    fn partials_are_exact() {
        let (v, g) =
            eval_with_partials(&parse("x^2*y").unwrap(), &env(&[("x", 3.0), ("y", 2.0)]), &["x", "y"])
                .unwrap();
        assert_eq!((v, g), (18.0, vec![12.0, 9.0]));
        let (v, g) = eval_with_partials(&parse("sin(x)").unwrap(), &env(&[("x", 0.0)]), &["x"]).unwrap();
        assert_eq!((v, g), (0.0, vec![1.0]));
    }

    #[test]
    fn zero_power_zero() {
        let e = parse("x^0").unwrap();
        let (v, g) = eval_with_partials(&e, &env(&[("x", 0.0)]), &["x"]).unwrap();
        assert_eq!((v, g), (1.0, vec![0.0]));
    }

    #[test]
    fn negative_base_integer_power() {
        let e = parse("x^3").unwrap();
        let (v, g) = eval_with_partials(&e, &env(&[("x", -2.0)]), &["x"]).unwrap();
        assert_eq!((v, g), (-8.0, vec![12.0]));
    }

    #[test]
    fn general_power_uses_exp_log() {
        let e = parse("x^y").unwrap();
        let (v, g) = eval_with_partials(&e, &env(&[("x", 2.0), ("y", 3.0)]), &["x", "y"]).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
        assert!((g[0] - 12.0).abs() < 1e-12);
        assert!((g[1] - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn f32_evaluation() {
        let b = Bound::new(&parse("x*x + 1").unwrap(), &["x"]).unwrap();
        let (v, g) = b.value_grad(&[2.0_f32]).unwrap();
        assert_eq!((v, g), (5.0_f32, vec![4.0_f32]));
    }
}
