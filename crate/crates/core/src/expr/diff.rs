//! Symbolic first derivatives.
//!
//! Used where a derivative must itself be stored as an expression: exact
//! sections `d S`, fiber maps of tangent morphisms, and Hamiltonian-dependent
//! structure coefficients. The rules mirror the dual-number evaluator exactly,
//! including the literal-exponent power rule.

use super::{add, div, mul, negate, sub, BinOp, Expr, Func};

impl Expr {
    /// `∂self/∂var` as an expression.
    pub fn partial(&self, var: &str) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(v) => Expr::Num(if &**v == var { 1.0 } else { 0.0 }),
            Expr::Neg(e) => negate(e.partial(var)),
            Expr::Call(f, u) => {
                let du = u.partial(var);
                if du.is_zero_literal() {
                    return Expr::Num(0.0);
                }
                let u = (**u).clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Cos => negate(Expr::call(Func::Sin, u)),
                    Func::Tan => div(
                        Expr::Num(1.0),
                        Expr::binary(BinOp::Pow, Expr::call(Func::Cos, u), Expr::Num(2.0)),
                    ),
                    Func::Exp => Expr::call(Func::Exp, u),
                    Func::Log => div(Expr::Num(1.0), u),
                    Func::Sqrt => div(Expr::Num(1.0), mul(Expr::Num(2.0), Expr::call(Func::Sqrt, u))),
                };
                mul(outer, du)
            }
            Expr::Binary(op, l, r) => {
                let (dl, dr) = (l.partial(var), r.partial(var));
                let (l, r) = ((**l).clone(), (**r).clone());
                match op {
                    BinOp::Add => add(dl, dr),
                    BinOp::Sub => sub(dl, dr),
                    BinOp::Mul => add(mul(dl, r), mul(l, dr)),
                    BinOp::Div => {
                        if dr.is_zero_literal() {
                            div(dl, r)
                        } else {
                            div(
                                sub(mul(dl, r.clone()), mul(l, dr)),
                                Expr::binary(BinOp::Pow, r, Expr::Num(2.0)),
                            )
                        }
                    }
                    BinOp::Pow => match r.literal_value() {
                        Some(c) => {
                            if c == 0.0 || dl.is_zero_literal() {
                                return Expr::Num(0.0);
                            }
                            let lowered = if c == 1.0 {
                                Expr::Num(1.0)
                            } else {
                                Expr::binary(BinOp::Pow, l, Expr::Num(c - 1.0))
                            };
                            mul(mul(Expr::Num(c), lowered), dl)
                        }
                        None => {
                            // d(u^v) = u^v (v' log u + v u'/u)
                            let whole = Expr::binary(BinOp::Pow, l.clone(), r.clone());
                            let inner = add(
                                mul(dr, Expr::call(Func::Log, l.clone())),
                                mul(r, div(dl, l)),
                            );
                            mul(whole, inner)
                        }
                    },
                }
            }
        }
    }
}
