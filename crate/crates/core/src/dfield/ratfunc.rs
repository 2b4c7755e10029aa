use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Differential, Field, Fp, SqrtField};
use crate::error::{Error, Result};
use crate::upoly::Poly;

/// Rational function `numer / denom` in one variable, kept in canonical
/// form: denominator monic, numerator and denominator coprime, zero as `0/1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc<K: Field> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: Field> RatFunc<K> {
    pub fn from_parts(num: Poly<K>, den: Poly<K>) -> Result<RatFunc<K>> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::from_poly(Poly::zero(den.proto())));
        }
        if den.is_constant() {
            let inv = den.lc().inv()?;
            return Ok(RatFunc {
                num: num.scale(&inv),
                den: Poly::one(den.proto()),
            });
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        let inv = den.lc().inv()?;
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    /// Like [`RatFunc::from_parts`] for a pair already known to be coprime:
    /// only the denominator is normalized.
    pub fn from_coprime_parts(num: Poly<K>, den: Poly<K>) -> Result<RatFunc<K>> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::from_poly(Poly::zero(den.proto())));
        }
        let inv = den.lc().inv()?;
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(num: Poly<K>) -> RatFunc<K> {
        let den = Poly::one(num.proto());
        RatFunc { num, den }
    }

    pub fn constant(c: K) -> RatFunc<K> {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The variable itself.
    pub fn var(proto: &K) -> RatFunc<K> {
        RatFunc::from_poly(Poly::x(proto))
    }

    pub fn numer(&self) -> &Poly<K> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<K> {
        &self.den
    }

    pub fn proto(&self) -> &K {
        self.num.proto()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    /// The constant value, if this is a constant function.
    pub fn as_constant(&self) -> Option<K> {
        (self.den.is_constant() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    /// Evaluates at a point of the coefficient field; `None` at a pole.
    pub fn eval(&self, x: &K) -> Option<K> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) * d.inv().ok()?)
    }

    /// Evaluates at an element of any field containing the coefficients.
    pub fn eval_in<L: Field>(&self, x: &L, embed: impl Fn(&K) -> L) -> Result<L> {
        let horner = |p: &Poly<K>| {
            let mut acc = x.zero_like();
            for c in p.coeffs().iter().rev() {
                acc = acc * x.clone() + embed(c);
            }
            acc
        };
        horner(&self.num).div(&horner(&self.den))
    }

    /// Derivative with respect to the variable.
    pub fn derivative(&self) -> RatFunc<K> {
        if self.is_poly() {
            return RatFunc::from_poly(self.num.derivative());
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::from_parts(n, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Applies `f` to every coefficient and re-canonicalizes.
    pub fn map<L: Field>(&self, proto: &L, f: impl Fn(&K) -> L) -> Result<RatFunc<L>> {
        RatFunc::from_parts(self.num.map(proto, &f), self.den.map(proto, &f))
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.den.is_constant() {
            return self.num.fmt_var(var);
        }
        format!("({})/({})", self.num.fmt_var(var), self.den.fmt_var(var))
    }
}

impl<K: Field> Add for RatFunc<K> {
    type Output = RatFunc<K>;
    fn add(self, rhs: RatFunc<K>) -> RatFunc<K> {
        if self.den == rhs.den {
            if self.den.is_constant() {
                return RatFunc::from_poly(&self.num + &rhs.num);
            }
            return RatFunc::from_parts(&self.num + &rhs.num, self.den).expect("nonzero");
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::from_parts(n, &self.den * &rhs.den).expect("nonzero")
    }
}

impl<K: Field> Sub for RatFunc<K> {
    type Output = RatFunc<K>;
    fn sub(self, rhs: RatFunc<K>) -> RatFunc<K> {
        self + (-rhs)
    }
}

impl<K: Field> Mul for RatFunc<K> {
    type Output = RatFunc<K>;
    fn mul(self, rhs: RatFunc<K>) -> RatFunc<K> {
        if self.num.is_zero() || rhs.num.is_zero() {
            return self.zero_like();
        }
        if self.is_poly() && rhs.is_poly() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel so the product is already coprime
        let g1 = self.num.gcd(&rhs.den).expect("field gcd");
        let g2 = rhs.num.gcd(&self.den).expect("field gcd");
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = rhs.den.div_exact(&g1).expect("gcd divides");
        let c = rhs.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        let num = &a * &c;
        let den = &b * &d;
        let inv = den.lc().inv().expect("nonzero");
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }
}

impl<K: Field> Neg for RatFunc<K> {
    type Output = RatFunc<K>;
    fn neg(self) -> RatFunc<K> {
        RatFunc {
            num: -self.num,
            den: self.den,
        }
    }
}

impl<K: Field> fmt::Display for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_var("t"))
    }
}

impl<K: Field> Field for RatFunc<K> {
    fn zero_like(&self) -> Self {
        RatFunc::from_poly(Poly::zero(self.proto()))
    }

    fn one_like(&self) -> Self {
        RatFunc::from_poly(Poly::one(self.proto()))
    }

    fn from_int_like(&self, n: i64) -> Self {
        RatFunc::constant(self.proto().from_int_like(n))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = self.num.lc().inv()?;
        Ok(RatFunc {
            num: self.den.scale(&inv),
            den: self.num.scale(&inv),
        })
    }

    fn characteristic(&self) -> u64 {
        self.proto().characteristic()
    }
}

impl<K: Field> Differential for RatFunc<K> {
    fn derive(&self) -> Self {
        self.derivative()
    }
}

/// Squarefree decomposition of a monic polynomial over `F_p`:
/// pairs `(g, i)` with `f = Π g^i`, each `g` squarefree and the `g` pairwise coprime.
pub fn squarefree_decomposition(f: &Poly<Fp>) -> Vec<(Poly<Fp>, usize)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let p = f.proto().modulus() as usize;
    let f = f.monic().expect("nonzero");
    let mut c = f.gcd(&f.derivative()).expect("gcd");
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(&c).expect("gcd");
        let z = w.div_exact(&y).expect("gcd divides");
        if !z.is_constant() {
            out.push((z, i));
        }
        i += 1;
        c = c.div_exact(&y).expect("gcd divides");
        w = y;
    }
    if !c.is_constant() {
        let root = poly_pth_root(&c).expect("derivative-free part is a p-th power");
        for (g, j) in squarefree_decomposition(&root) {
            out.push((g, j * p));
        }
    }
    out
}

fn poly_pth_root(f: &Poly<Fp>) -> Option<Poly<Fp>> {
    let p = f.proto().modulus() as usize;
    if f.coeffs().iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
        return None;
    }
    Some(Poly::new(f.coeffs().iter().step_by(p).cloned().collect(), *f.proto()))
}

impl RatFunc<Fp> {
    pub fn modulus(&self) -> u64 {
        self.proto().modulus()
    }

    /// The unique `b` with `b^p = self`.
    pub fn pth_root(&self) -> Result<RatFunc<Fp>> {
        let num = poly_pth_root(&self.num).ok_or(Error::NotAPthPower)?;
        let den = poly_pth_root(&self.den).ok_or(Error::NotAPthPower)?;
        RatFunc::from_parts(num, den)
    }

    /// Frobenius on coefficients is trivial over `F_p`, so this is `self^p`
    /// computed by substituting `t ↦ t^p`.
    pub fn frobenius(&self) -> RatFunc<Fp> {
        let p = self.modulus() as usize;
        RatFunc {
            num: self.num.substitute_power(p),
            den: self.den.substitute_power(p),
        }
    }

    /// Writes `self = d · s²` with `d` a squarefree polynomial whose leading
    /// coefficient is `1` or a quadratic non-residue.
    pub fn square_class(&self) -> Result<(Poly<Fp>, RatFunc<Fp>)> {
        if self.is_zero() {
            return Err(Error::NotASquare("zero has no square class".into()));
        }
        let proto = *self.proto();
        let one = Poly::one(&proto);
        let split = |f: &Poly<Fp>| {
            let mut d = one.clone();
            let mut s = one.clone();
            for (g, i) in squarefree_decomposition(f) {
                if i % 2 == 1 {
                    d = &d * &g;
                }
                s = &s * &g.pow((i / 2) as u64);
            }
            (d, s)
        };
        let lc = self.num.lc();
        let (d1, s1) = split(&self.num);
        let (d2, s2) = split(&self.den);
        // n/d = lc·d1·s1² / (d2·s2²) = lc·d1·d2 · (s1 / (d2·s2))²
        let mut s = RatFunc::from_parts(s1, &d2 * &s2)?;
        let mut d = &d1 * &d2;
        match lc.sqrt()? {
            Some(r) => s = s * RatFunc::constant(r),
            None => d = d.scale(&lc),
        }
        Ok((d, s))
    }

    /// Square root in `F_p(t)`; `NotASquare` names the obstruction.
    pub fn sqrt_checked(&self) -> Result<RatFunc<Fp>> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (d, s) = self.square_class()?;
        if !d.is_constant() {
            return Err(Error::NotASquare(format!(
                "{} has odd-multiplicity factor {}",
                self,
                d.monic()?.fmt_var("t")
            )));
        }
        if !d.lc().is_one() {
            return Err(Error::NotASquare(format!(
                "{} has non-residue constant {}",
                self,
                d.lc()
            )));
        }
        Ok(s)
    }

    /// Square root via [`SqrtField`], used as a leading-coefficient oracle.
    pub fn sqrt_fp(&self) -> Result<Option<RatFunc<Fp>>> {
        self.sqrt()
    }
}

impl SqrtField for RatFunc<Fp> {
    fn sqrt(&self) -> Result<Option<RatFunc<Fp>>> {
        match self.sqrt_checked() {
            Ok(r) => Ok(Some(r)),
            Err(Error::NotASquare(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfield::{parse_expr, reduce_mod_p};
    use proptest::prelude::*;

    fn rf(s: &str, p: u64) -> RatFunc<Fp> {
        reduce_mod_p(&parse_expr(s).unwrap().eval_rational().unwrap(), p).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let p = 7;
        assert_eq!(rf("t/(1+t)", p) + rf("1/(1+t)", p), rf("1", p));
        assert_eq!(rf("t", p) * rf("t", p).inv().unwrap(), rf("1", p));
        let a = RatFunc::from_parts(
            Poly::new(vec![Fp::new(1, 3), Fp::new(0, 3), Fp::new(1, 3)], Fp::new(0, 3)),
            Poly::constant(Fp::new(2, 3)),
        )
        .unwrap();
        assert_eq!(a, rf("2*t^2+2", 3));
        assert!(rf("0", 5).inv().is_err());
    }

    #[test]
    fn derivation_examples() {
        assert!(rf("t^3", 3).derive().is_zero());
        assert_eq!(rf("(t^2+1)/t", 7).derive(), rf("(t^2-1)/t^2", 7));
    }

    #[test]
    fn pth_roots() {
        assert!(rf("t^3+1", 3).is_delta_constant());
        assert_eq!(rf("t^3+1", 3).pth_root().unwrap(), rf("t+1", 3));
        assert!(!rf("t", 3).is_delta_constant());
        assert_eq!(rf("t", 3).pth_root(), Err(Error::NotAPthPower));
    }

    #[test]
    fn sqrt_examples() {
        let r = rf("t^2+2*t+1", 3).sqrt_checked().unwrap();
        assert!(r == rf("t+1", 3) || r == rf("-t-1", 3));
        assert!(matches!(rf("t", 3).sqrt_checked(), Err(Error::NotASquare(_))));
        assert!(matches!(rf("2", 3).sqrt_checked(), Err(Error::NotASquare(_))));
        let r = rf("(t^6+2)^2*(t-1)^3/(t^2*(t-1))", 5).sqrt_checked().unwrap();
        assert_eq!(r.square(), rf("(t^6+2)^2*(t-1)^3/(t^2*(t-1))", 5));
    }

    #[test]
    fn square_class_reconstructs() {
        for s in ["2*t^3*(t+1)^4/(t-2)^3", "3*(t^3+t)^3", "t^5/(t+1)", "2"] {
            let a = rf(s, 5);
            let (d, r) = a.square_class().unwrap();
            assert_eq!(RatFunc::from_poly(d) * r.square(), a);
        }
    }

    fn arb_rf(p: u64) -> impl Strategy<Value = RatFunc<Fp>> {
        (
            prop::collection::vec(0..p as i64, 0..5),
            prop::collection::vec(0..p as i64, 0..4),
        )
            .prop_map(move |(n, d)| {
                let zero = Fp::new(0, p);
                let num = Poly::new(n.iter().map(|&c| Fp::new(c, p)).collect(), zero);
                let mut dc: Vec<Fp> = d.iter().map(|&c| Fp::new(c, p)).collect();
                dc.push(Fp::new(1, p));
                RatFunc::from_parts(num, Poly::new(dc, zero)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn leibniz(a in arb_rf(5), b in arb_rf(5)) {
            let lhs = (a.clone() * b.clone()).derive();
            let rhs = a.clone() * b.derive() + b * a.derive();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pth_powers_are_constants(a in arb_rf(7)) {
            prop_assert!(a.pow(7).derive().is_zero());
            prop_assert_eq!(a.pow(7), a.frobenius());
            prop_assert_eq!(a.pow(7).pth_root().unwrap(), a);
        }

        #[test]
        fn canonical_form_is_fixpoint(a in arb_rf(3)) {
            let again = RatFunc::from_parts(a.numer().clone(), a.denom().clone()).unwrap();
            prop_assert!(a.denom().is_monic());
            prop_assert!(a.numer().gcd(a.denom()).unwrap().is_constant());
            prop_assert_eq!(again, a);
        }

        #[test]
        fn squares_have_roots(a in arb_rf(11)) {
            let sq = a.square();
            let r = sq.sqrt_checked().unwrap();
            prop_assert_eq!(r.square(), sq);
        }
    }
}
