//! Dense univariate polynomials over any [`Field`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::dfield::Field;
use crate::error::{Error, Result};

mod roots;

pub use roots::{rational_roots, Fq};

/// Dense polynomial, lowest degree first. The zero polynomial has no
/// coefficients; `zero` is a prototype of the coefficient field.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<K: Field> {
    coeffs: Vec<K>,
    zero: K,
}

impl<K: Field> Poly<K> {
    pub fn new(mut coeffs: Vec<K>, zero: K) -> Poly<K> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, zero }
    }

    pub fn zero(proto: &K) -> Poly<K> {
        Poly {
            coeffs: Vec::new(),
            zero: proto.zero_like(),
        }
    }

    pub fn one(proto: &K) -> Poly<K> {
        Poly::constant(proto.one_like())
    }

    pub fn constant(c: K) -> Poly<K> {
        let zero = c.zero_like();
        Poly::new(vec![c], zero)
    }

    /// `c·x^k`.
    pub fn monomial(c: K, k: usize) -> Poly<K> {
        let zero = c.zero_like();
        let mut coeffs = vec![zero.clone(); k];
        coeffs.push(c);
        Poly::new(coeffs, zero)
    }

    /// The variable `x`.
    pub fn x(proto: &K) -> Poly<K> {
        Poly::monomial(proto.one_like(), 1)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<K> {
        self.coeffs
    }

    pub fn proto(&self) -> &K {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn lc(&self) -> K {
        self.coeffs.last().cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &K) -> Poly<K> {
        Poly::new(
            self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            self.zero.clone(),
        )
    }

    pub fn shift(&self, k: usize) -> Poly<K> {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.zero.clone(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(coeffs, self.zero.clone())
    }

    pub fn monic(&self) -> Result<Poly<K>> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let inv = self.lc().inv()?;
        Ok(self.scale(&inv))
    }

    pub fn map<L: Field>(&self, proto: &L, f: impl Fn(&K) -> L) -> Poly<L> {
        Poly::new(self.coeffs.iter().map(f).collect(), proto.zero_like())
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Poly<K> {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * c.from_int_like(i as i64))
                .collect(),
            self.zero.clone(),
        )
    }

    pub fn pow(&self, mut e: u64) -> Poly<K> {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.zero);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Drops every term of degree `> k`.
    pub fn truncate(&self, k: usize) -> Poly<K> {
        Poly::new(self.coeffs.iter().take(k + 1).cloned().collect(), self.zero.clone())
    }

    fn mul_truncated(&self, other: &Poly<K>, k: usize) -> Poly<K> {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.zero);
        }
        let n = (self.coeffs.len() + other.coeffs.len() - 1).min(k + 1);
        let mut out = vec![self.zero.clone(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out, self.zero.clone())
    }

    /// Coefficient of `x^k` in `self^e`, by binary powering with every
    /// intermediate product truncated at degree `k`.
    pub fn power_coeff(&self, mut e: u64, k: usize) -> K {
        let mut base = self.truncate(k);
        let mut acc = Poly::one(&self.zero);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_truncated(&base, k);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_truncated(&base, k);
            }
        }
        acc.coeff(k)
    }

    pub fn div_rem(&self, d: &Poly<K>) -> Result<(Poly<K>, Poly<K>)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = d.lc().inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(&self.zero), self.clone()));
        }
        let mut q = vec![self.zero.clone(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i].clone() * lc_inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = r[i - dd + j].clone() - c.clone() * dc.clone();
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q, self.zero.clone()), Poly::new(r, self.zero.clone())))
    }

    pub fn rem(&self, d: &Poly<K>) -> Result<Poly<K>> {
        Ok(self.div_rem(d)?.1)
    }

    /// Exact quotient; fails with a structure violation if `d` does not divide.
    pub fn div_exact(&self, d: &Poly<K>) -> Result<Poly<K>> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::StructureViolation("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly<K>) -> Result<Poly<K>> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r.monic()?;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn gcdex(&self, other: &Poly<K>) -> Result<(Poly<K>, Poly<K>, Poly<K>)> {
        let zero = Poly::zero(&self.zero);
        let one = Poly::one(&self.zero);
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let inv = r0.lc().inv()?;
        Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
    }

    /// `f / gcd(f, f′)`, made monic.
    pub fn squarefree_part(&self) -> Result<Poly<K>> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let g = self.gcd(&self.derivative())?;
        if g.is_zero() {
            return self.monic();
        }
        self.div_exact(&g)?.monic()
    }

    /// `g(x^k)`.
    pub fn substitute_power(&self, k: usize) -> Poly<K> {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.zero.clone(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Poly::new(coeffs, self.zero.clone())
    }

    /// Writes `F(x) = c·g(x^p)` with `g` monic, when every exponent carrying
    /// a nonzero coefficient is divisible by `p`.
    pub fn detect_p_power_substitution(&self, p: usize) -> Option<(K, Poly<K>)> {
        if self.is_zero() {
            return None;
        }
        if self.coeffs.iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
            return None;
        }
        let c = self.lc();
        let inv = c.inv().ok()?;
        let g = Poly::new(
            self.coeffs.iter().step_by(p).map(|a| a.clone() * inv.clone()).collect(),
            self.zero.clone(),
        );
        Some((c, g))
    }

    /// Square root by top-down coefficient matching. `lc_sqrt` supplies a
    /// square root of the leading coefficient. Returns `None` if the
    /// polynomial is not a square. Requires characteristic `≠ 2`.
    pub fn sqrt_with(&self, lc_sqrt: impl Fn(&K) -> Result<Option<K>>) -> Result<Option<Poly<K>>> {
        let Some(d) = self.degree() else {
            return Ok(Some(self.clone()));
        };
        if d % 2 == 1 {
            return Ok(None);
        }
        let Some(r_top) = lc_sqrt(&self.lc())? else {
            return Ok(None);
        };
        let n = d / 2;
        let denom = (r_top.clone() * r_top.from_int_like(2)).inv()?;
        // r = Σ r_i x^i, i = n..0; coefficient of x^{n+k} in r² fixes r_k.
        let mut r = vec![self.zero.clone(); n + 1];
        r[n] = r_top;
        for k in (0..n).rev() {
            let deg = n + k;
            let mut acc = self.coeff(deg);
            for i in (k + 1)..=n {
                let j = deg - i;
                if j > n || j <= k {
                    continue;
                }
                acc = acc - r[i].clone() * r[j].clone();
            }
            r[k] = acc * denom.clone();
        }
        let root = Poly::new(r, self.zero.clone());
        if &(&root * &root) == self {
            Ok(Some(root))
        } else {
            Ok(None)
        }
    }
}

impl<K: Field> Add for &Poly<K> {
    type Output = Poly<K>;
    fn add(self, rhs: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly::new(coeffs, self.zero.clone())
    }
}

impl<K: Field> Sub for &Poly<K> {
    type Output = Poly<K>;
    fn sub(self, rhs: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly::new(coeffs, self.zero.clone())
    }
}

impl<K: Field> Mul for &Poly<K> {
    type Output = Poly<K>;
    fn mul(self, rhs: &Poly<K>) -> Poly<K> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.zero);
        }
        let mut out = vec![self.zero.clone(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out, self.zero.clone())
    }
}

impl<K: Field> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect(), self.zero.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<K: Field> $tr for Poly<K> {
            type Output = Poly<K>;
            fn $m(self, rhs: Poly<K>) -> Poly<K> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<K: Field> Neg for Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        -&self
    }
}

impl<K: Field> Poly<K> {
    /// Formats with a chosen variable name.
    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', '-', '/', ' ', '(']) => (true, rest.to_string()),
                _ => (false, cs),
            };
            let compound = body.contains(['+', ' ']) || body[1..].contains('-');
            let body = if compound || (i > 0 && body.contains('/')) {
                format!("({body})")
            } else {
                body
            };
            let term = match i {
                0 => body,
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                    if body == "1" {
                        mono
                    } else {
                        format!("{body}*{mono}")
                    }
                }
            };
            match (out.is_empty(), neg) {
                (true, true) => out.push('-'),
                (false, true) => out.push('-'),
                (false, false) => out.push('+'),
                (true, false) => {}
            }
            out.push_str(&term);
        }
        out
    }
}

impl<K: Field> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_var("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfield::{parse_expr, reduce_mod_p, Fp, RatFunc};
    use proptest::prelude::*;

    fn rf(s: &str, p: u64) -> RatFunc<Fp> {
        reduce_mod_p(&parse_expr(s).unwrap().eval_rational().unwrap(), p).unwrap()
    }

    fn px(coeffs: &[&str], p: u64) -> Poly<RatFunc<Fp>> {
        let proto = rf("0", p);
        Poly::new(coeffs.iter().map(|s| rf(s, p)).collect(), proto)
    }

    fn fpoly(coeffs: &[i64], p: u64) -> Poly<Fp> {
        Poly::new(coeffs.iter().map(|&c| Fp::new(c, p)).collect(), Fp::new(0, p))
    }

    #[test]
    fn gcd_examples() {
        let p = 7;
        let f = fpoly(&[-1, 0, 1], p);
        let g = fpoly(&[-1, 1], p);
        assert_eq!(f.gcd(&g).unwrap(), g);
        let h = fpoly(&[3, 0, 6], p);
        assert_eq!(h.gcd(&Poly::zero(&Fp::new(0, p))).unwrap(), h.monic().unwrap());
    }

    #[test]
    fn squarefree_part_over_function_field() {
        let p = 5;
        // (x - t)^2 (x + 1)
        let a = px(&["-t", "1"], p);
        let b = px(&["1", "1"], p);
        let f = &(&a * &a) * &b;
        assert_eq!(f.squarefree_part().unwrap(), (&a * &b).monic().unwrap());
    }

    #[test]
    fn power_coeff_examples() {
        let f3 = px(&["0", "t", "-(1+t)", "1"], 3);
        assert_eq!(f3.power_coeff(1, 2), rf("2+2*t", 3));
        let f5 = px(&["0", "t", "-(1+t)", "1"], 5);
        assert_eq!(f5.power_coeff(2, 4), rf("1+4*t+t^2", 5));
        assert_eq!(f5.power_coeff(0, 0), rf("1", 5));
    }

    #[test]
    fn p_power_substitution_examples() {
        let f = px(&["2*t^2", "0", "0", "2*(1+t)"], 3);
        let (c, g) = f.detect_p_power_substitution(3).unwrap();
        assert_eq!(c, rf("2*(1+t)", 3));
        assert_eq!(g, px(&["t^2/(1+t)", "1"], 3));
        assert_eq!(&g.substitute_power(3).scale(&c), &f);

        let xp = px(&["0", "0", "0", "1"], 3);
        let (c, g) = xp.detect_p_power_substitution(3).unwrap();
        assert!(c.is_one());
        assert_eq!(g, px(&["0", "1"], 3));

        assert!(px(&["1", "1"], 3).detect_p_power_substitution(3).is_none());
    }

    #[test]
    fn sqrt_matches_squares() {
        let a = px(&["t", "1+t", "2"], 5);
        let sq = &a * &a;
        let r = sq.sqrt_with(|c| c.sqrt_fp()).unwrap().unwrap();
        assert!(r == a || r == -&a);
        assert!(px(&["t", "0", "1"], 5).sqrt_with(|c| c.sqrt_fp()).unwrap().is_none());
    }

    fn arb_poly(p: u64, max_deg: usize) -> impl Strategy<Value = Poly<Fp>> {
        prop::collection::vec(0..p as i64, 0..=max_deg + 1).prop_map(move |cs| fpoly(&cs, p))
    }

    proptest! {
        #[test]
        fn power_coeff_matches_full_expansion(f in arb_poly(7, 5), e in 0u64..=4, k in 0usize..12) {
            prop_assert_eq!(f.power_coeff(e, k), f.pow(e).coeff(k));
        }

        #[test]
        fn substitution_reconstructs(g in arb_poly(5, 4), c in 1i64..5) {
            let f = g.substitute_power(5).scale(&Fp::new(c, 5));
            if let Some((c, h)) = f.detect_p_power_substitution(5) {
                prop_assert_eq!(h.substitute_power(5).scale(&c), f);
            } else {
                prop_assert!(f.is_zero());
            }
        }

        #[test]
        fn gcdex_bezout(a in arb_poly(11, 6), b in arb_poly(11, 6)) {
            let (g, s, t) = a.gcdex(&b).unwrap();
            prop_assert_eq!(&(&s * &a) + &(&t * &b), g.clone());
            if !g.is_zero() {
                prop_assert!(a.rem(&g).unwrap().is_zero());
                prop_assert!(b.rem(&g).unwrap().is_zero());
            }
        }
    }
}
