//! Rational-function expressions in `t`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' uint)*
//! atom  := uint | 't' | '(' expr ')'
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Field, RatFunc, Rational};
use crate::error::{Error, Result};
use crate::upoly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Evaluates over `Q(t)`.
    pub fn eval_rational(&self) -> Result<RatFunc<Rational>> {
        let proto = BigRational::from_integer(BigInt::from(0));
        Ok(match self {
            Expr::Int(n) => RatFunc::constant(BigRational::from_integer(n.clone())),
            Expr::T => RatFunc::from_poly(Poly::x(&proto)),
            Expr::Neg(a) => -a.eval_rational()?,
            Expr::Add(a, b) => a.eval_rational()? + b.eval_rational()?,
            Expr::Sub(a, b) => a.eval_rational()? - b.eval_rational()?,
            Expr::Mul(a, b) => a.eval_rational()? * b.eval_rational()?,
            Expr::Div(a, b) => a.eval_rational()?.div(&b.eval_rational()?)?,
            Expr::Pow(a, n) => a.eval_rational()?.pow(u64::from(*n)),
        })
    }
}

/// Fully parenthesized form; parsing it back yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::T => write!(f, "t"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, n) => write!(f, "({a}^{n})"),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    parse_expr_at(s, 1, 1)
}

/// Parses `s`, reporting positions as if `s` started at `line`, `column`.
pub fn parse_expr_at(s: &str, line: usize, column: usize) -> Result<Expr> {
    let mut parser = Parser {
        chars: s.chars().collect(),
        pos: 0,
        line,
        column,
    };
    let e = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        let c = parser.chars[parser.pos];
        return Err(parser.error(format!("unexpected '{c}'")));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column + self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let start = self.pos;
            let digits = self.digits();
            let n: u32 = digits.parse().map_err(|_| Error::Parse {
                line: self.line,
                column: self.column + start,
                message: "exponent too large".into(),
            })?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('t') => {
                self.pos += 1;
                Ok(Expr::T)
            }
            Some('(') => {
                let open = self.pos;
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    let mut err = self.error("unbalanced parenthesis");
                    if self.pos >= self.chars.len() {
                        if let Error::Parse { column, .. } = &mut err {
                            *column = self.column + open;
                        }
                    }
                    return Err(err);
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                Ok(Expr::Int(d.parse().expect("ascii digits")))
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
