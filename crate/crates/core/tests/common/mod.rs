#![allow(dead_code)]

use manin_core::dfield::{parse_expr, reduce_mod_p, Elem, RatFunc, Rational};
use manin_core::ecurve::Curve;

pub const EXPRESSIONS: &str = include_str!("../data/expressions.txt");

pub fn corpus() -> Vec<&'static str> {
    EXPRESSIONS.lines().filter(|l| !l.trim().is_empty()).collect()
}

pub fn qt(s: &str) -> RatFunc<Rational> {
    parse_expr(s).unwrap().eval_rational().unwrap()
}

pub fn el(s: &str, p: u64) -> Elem {
    Elem::from_ratfunc(reduce_mod_p(&qt(s), p).unwrap())
}

pub fn curve(a2: &str, a4: &str, a6: &str, p: u64) -> Curve<Elem> {
    Curve::new(el(a2, p), el(a4, p), el(a6, p)).unwrap()
}

pub fn legendre(p: u64) -> Curve<Elem> {
    curve("-(1+t)", "t", "0", p)
}

/// `y² = x³ + x + t²` over `F_5(t)`.
pub fn curve_b() -> Curve<Elem> {
    curve("0", "1", "t^2", 5)
}

/// `y² = x³ + x² + tx` over `F_3(t)`.
pub fn curve_c() -> Curve<Elem> {
    curve("1", "t", "0", 3)
}
