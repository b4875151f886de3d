//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", fmt_expected(.expected))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

fn fmt_expected(expected: &[&'static str]) -> String {
    expected.join(", ")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(c) => write!(f, "number `{c}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Op(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            let bytes = rest.as_bytes();
            let mut i = 0;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &rest[..i];
            let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                offset: start,
                found: format!("malformed number `{text}`"),
                expected: vec!["number"],
            })?;
            self.pos += i;
            return Ok((Tok::Num(value), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            found: format!("character `{c}`"),
            expected: vec!["number", "identifier", "`(`", "`-`"],
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, offset) = lexer.next()?;
        Ok(Parser { lexer, tok, offset })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, offset) = self.lexer.next()?;
        self.tok = tok;
        self.offset = offset;
        Ok(())
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            offset: self.offset,
            found: self.tok.to_string(),
            expected,
        }
    }

    fn expect_op(&mut self, op: char, name: &'static str) -> Result<(), ParseError> {
        if self.tok == Tok::Op(op) {
            self.bump()
        } else {
            Err(self.error(vec![name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(c) => {
                self.bump()?;
                Ok(Expr::Num(c))
            }
            Tok::Ident(name) => {
                let offset = self.offset;
                self.bump()?;
                if self.tok == Tok::Op('(') {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { name, offset })?;
                    self.bump()?;
                    let arg = self.expr()?;
                    self.expect_op(')', "`)`")?;
                    Ok(Expr::call(func, arg))
                } else {
                    Ok(Expr::var(&name))
                }
            }
            Tok::Op('(') => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect_op(')', "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(vec!["number", "identifier", "`(`", "`-`"])),
        }
    }
}

/// Parses an expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error(vec!["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(c: f64) -> Expr {
        Expr::Num(c)
    }

    #[test]
    fn power_over_division() {
        let e = parse("p^2/2").unwrap();
        assert_eq!(
            e,
            Expr::binary(
                BinOp::Div,
                Expr::binary(BinOp::Pow, Expr::var("p"), n(2.0)),
                n(2.0)
            )
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(
            parse("-x^2").unwrap(),
            Expr::neg(Expr::binary(BinOp::Pow, Expr::var("x"), n(2.0)))
        );
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(
            parse("a^b^c").unwrap(),
            Expr::binary(
                BinOp::Pow,
                Expr::var("a"),
                Expr::binary(BinOp::Pow, Expr::var("b"), Expr::var("c"))
            )
        );
    }

    #[test]
    fn unary_minus_binds_tighter_than_product() {
        assert_eq!(
            parse("-a*b").unwrap(),
            Expr::binary(BinOp::Mul, Expr::neg(Expr::var("a")), Expr::var("b"))
        );
    }

    #[test]
    fn numbers_with_fraction_and_exponent() {
        assert_eq!(parse("1.5e-3").unwrap(), n(1.5e-3));
        assert_eq!(parse("2E+2").unwrap(), n(200.0));
        assert_eq!(parse("3.").unwrap(), n(3.0));
    }

    #[test]
    fn syntax_error_reports_offset_and_expectations() {
        match parse("x + * y") {
            Err(ParseError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 4);
                assert!(expected.contains(&"identifier"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("(x + 1") {
            Err(ParseError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 6);
                assert_eq!(expected, vec!["`)`"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x y"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("x $ 2"), Err(ParseError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn unknown_function_is_rejected() {
        assert_eq!(
            parse("1 + cosh(x)"),
            Err(ParseError::UnknownFunction { name: "cosh".into(), offset: 4 })
        );
    }
}
