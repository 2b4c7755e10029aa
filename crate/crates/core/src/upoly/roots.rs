//! Roots in `F_p(t)` of polynomials over `F_p(t)`, by specializing `t`,
//! lifting `t`-adically and reconstructing with Padé approximants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::Poly;
use crate::dfield::{Field, Fp, RatFunc};
use crate::error::{Error, Result};

/// Element of `F_q = F_p[a]/(m(a))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fq {
    rep: Poly<Fp>,
    modulus: Arc<Poly<Fp>>,
}

impl Fq {
    pub fn from_fp(c: Fp, modulus: &Arc<Poly<Fp>>) -> Fq {
        Fq {
            rep: Poly::constant(c),
            modulus: modulus.clone(),
        }
    }

    /// The prime-field value, if the element lies in `F_p`.
    pub fn as_fp(&self) -> Option<Fp> {
        self.rep.is_constant().then(|| self.rep.coeff(0))
    }

    /// All `p^s` elements of the field defined by `modulus`.
    pub fn elements(modulus: &Arc<Poly<Fp>>) -> Vec<Fq> {
        let p = modulus.proto().modulus();
        let s = modulus.degree().expect("nonzero modulus");
        let q = p.pow(s as u32);
        (0..q)
            .map(|mut i| {
                let mut coeffs = Vec::with_capacity(s);
                for _ in 0..s {
                    coeffs.push(Fp::from_u64(i % p, p));
                    i /= p;
                }
                Fq {
                    rep: Poly::new(coeffs, Fp::new(0, p)),
                    modulus: modulus.clone(),
                }
            })
            .collect()
    }

    /// A monic irreducible polynomial of degree `s` over `F_p`.
    pub fn modulus(p: u64, s: usize) -> Arc<Poly<Fp>> {
        let zero = Fp::new(0, p);
        if s == 1 {
            return Arc::new(Poly::x(&zero));
        }
        let count = p.pow(s as u32);
        for mut i in 0..count {
            let mut coeffs = Vec::with_capacity(s + 1);
            for _ in 0..s {
                coeffs.push(Fp::from_u64(i % p, p));
                i /= p;
            }
            coeffs.push(Fp::new(1, p));
            let m = Poly::new(coeffs, zero);
            if is_irreducible(&m) {
                return Arc::new(m);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

fn powmod(base: &Poly<Fp>, mut e: u64, m: &Poly<Fp>) -> Poly<Fp> {
    let mut acc = Poly::one(base.proto());
    let mut b = base.rem(m).expect("nonzero modulus");
    while e > 0 {
        if e & 1 == 1 {
            acc = (&acc * &b).rem(m).expect("nonzero modulus");
        }
        e >>= 1;
        if e > 0 {
            b = (&b * &b).rem(m).expect("nonzero modulus");
        }
    }
    acc
}

fn is_irreducible(m: &Poly<Fp>) -> bool {
    let p = m.proto().modulus();
    let n = m.degree().unwrap_or(0);
    let x = Poly::x(m.proto());
    let mut xq = x.clone();
    for _ in 1..=n / 2 {
        xq = powmod(&xq, p, m);
        let g = (&xq - &x).gcd(m).expect("field gcd");
        if !g.is_constant() {
            return false;
        }
    }
    true
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, rhs: Fq) -> Fq {
        Fq {
            rep: &self.rep + &rhs.rep,
            modulus: self.modulus,
        }
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, rhs: Fq) -> Fq {
        Fq {
            rep: &self.rep - &rhs.rep,
            modulus: self.modulus,
        }
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, rhs: Fq) -> Fq {
        let rep = (&self.rep * &rhs.rep).rem(&self.modulus).expect("nonzero modulus");
        Fq {
            rep,
            modulus: self.modulus,
        }
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        Fq {
            rep: -self.rep,
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep.fmt_var("a"))
    }
}

impl Field for Fq {
    fn zero_like(&self) -> Fq {
        Fq {
            rep: Poly::zero(self.rep.proto()),
            modulus: self.modulus.clone(),
        }
    }

    fn one_like(&self) -> Fq {
        Fq::from_fp(self.rep.proto().one_like(), &self.modulus)
    }

    fn from_int_like(&self, n: i64) -> Fq {
        Fq::from_fp(self.rep.proto().from_int_like(n), &self.modulus)
    }

    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    fn inv(&self) -> Result<Fq> {
        if self.rep.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = self.rep.gcdex(&self.modulus)?;
        if g.degree() != Some(0) {
            return Err(Error::ZeroDivisor);
        }
        Ok(Fq {
            rep: s.rem(&self.modulus)?,
            modulus: self.modulus.clone(),
        })
    }

    fn characteristic(&self) -> u64 {
        self.rep.proto().modulus()
    }
}

/// `a(s + τ)` for `a ∈ F_p[t]`, as a polynomial in `s` over `F_q`.
fn taylor_shift(a: &Poly<Fp>, tau: &Fq) -> Poly<Fq> {
    let lin = Poly::new(vec![tau.clone(), tau.one_like()], tau.zero_like());
    let mut acc = Poly::zero(tau);
    for c in a.coeffs().iter().rev() {
        acc = &(&acc * &lin) + &Poly::constant(Fq::from_fp(*c, &tau.modulus));
    }
    acc
}

fn shift_fq(a: &Poly<Fq>, tau: &Fq) -> Poly<Fq> {
    let lin = Poly::new(vec![tau.clone(), tau.one_like()], tau.zero_like());
    let mut acc = Poly::zero(tau);
    for c in a.coeffs().iter().rev() {
        acc = &(&acc * &lin) + &Poly::constant(c.clone());
    }
    acc
}

fn series_inv(b: &Poly<Fq>, n: usize) -> Result<Poly<Fq>> {
    let b0_inv = b.coeff(0).inv()?;
    let mut c: Vec<Fq> = Vec::with_capacity(n);
    c.push(b0_inv.clone());
    for k in 1..n {
        let mut acc = b.proto().zero_like();
        for j in 1..=k {
            acc = acc + b.coeff(j) * c[k - j].clone();
        }
        c.push(-(acc * b0_inv.clone()));
    }
    Ok(Poly::new(c, b.proto().zero_like()))
}

fn series_eval(f: &[Poly<Fq>], r: &Poly<Fq>, n: usize) -> Poly<Fq> {
    let mut acc = Poly::zero(r.proto());
    for c in f.iter().rev() {
        acc = (&(&acc * r) + c).truncate(n - 1);
    }
    acc
}

/// Rational reconstruction of `s` modulo `x^n` with numerator and
/// denominator degrees at most `d`.
fn pade(s: &Poly<Fq>, n: usize, d: usize) -> Option<(Poly<Fq>, Poly<Fq>)> {
    let proto = s.proto();
    let mut r0 = Poly::monomial(proto.one_like(), n);
    let mut r1 = s.clone();
    let mut t0 = Poly::zero(proto);
    let mut t1 = Poly::one(proto);
    while r1.degree().is_some_and(|e| e > d) {
        let (q, r) = r0.div_rem(&r1).ok()?;
        let t = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t);
    }
    if t1.degree()? > d || t1.coeff(0).is_zero() {
        return None;
    }
    Some((r1, t1))
}

fn within(r: &RatFunc<Fp>, bound: usize) -> bool {
    r.numer().degree().unwrap_or(0) <= bound && r.denom().degree().unwrap_or(0) <= bound
}

/// All roots in `F_p(t)` of `f` whose numerator and denominator have degree
/// at most `deg_bound`, sorted by their printed form.
pub fn rational_roots(f: &Poly<RatFunc<Fp>>, deg_bound: usize) -> Result<Vec<RatFunc<Fp>>> {
    if f.is_zero() {
        return Err(Error::Unsupported("roots of the zero polynomial".into()));
    }
    let p = f.proto().modulus();
    let fp0 = Fp::new(0, p);
    let sf = f.squarefree_part()?;
    let d = sf.degree().expect("nonzero");
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut l = Poly::one(&fp0);
    for c in sf.coeffs() {
        let g = l.gcd(c.denom())?;
        l = &l * &c.denom().div_exact(&g)?;
    }
    let big: Vec<Poly<Fp>> = sf
        .coeffs()
        .iter()
        .map(|c| Ok(c.numer() * &l.div_exact(c.denom())?))
        .collect::<Result<_>>()?;

    let mut roots: Vec<RatFunc<Fp>> = Vec::new();
    let mut accept = |r: RatFunc<Fp>| {
        if within(&r, deg_bound) && sf.eval(&r).is_zero() && !roots.contains(&r) {
            roots.push(r);
        }
    };

    if d == 1 {
        accept(RatFunc::from_parts(-big[0].clone(), big[1].clone())?);
    } else {
        let n = 2 * deg_bound + 2;
        for tau in good_points(&big, d) {
            let shifted: Vec<Poly<Fq>> = big.iter().map(|a| taylor_shift(a, &tau)).collect();
            let fd: Vec<Poly<Fq>> = shifted
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.scale(&tau.from_int_like(i as i64)))
                .collect();
            let spec: Vec<Fq> = shifted.iter().map(|a| a.coeff(0)).collect();
            let spec_poly = Poly::new(spec, tau.zero_like());
            for r0 in Fq::elements(&tau.modulus) {
                if !spec_poly.eval(&r0).is_zero() {
                    continue;
                }
                let mut r = Poly::constant(r0);
                let mut steps = 1usize;
                while (1usize << steps) < 2 * n {
                    steps += 1;
                }
                for _ in 0..steps {
                    let val = series_eval(&shifted, &r, n);
                    if val.is_zero() {
                        break;
                    }
                    let der = series_eval(&fd, &r, n);
                    let step = (&val * &series_inv(&der, n)?).truncate(n - 1);
                    r = &r - &step;
                }
                let Some((num, den)) = pade(&r, n, deg_bound) else {
                    continue;
                };
                let minus_tau = -tau.clone();
                let num = shift_fq(&num, &minus_tau);
                let den = shift_fq(&den, &minus_tau);
                let lc_inv = den.lc().inv()?;
                let lower = |a: &Poly<Fq>| -> Option<Poly<Fp>> {
                    let cs: Option<Vec<Fp>> = a.scale(&lc_inv).coeffs().iter().map(|c| c.as_fp()).collect();
                    Some(Poly::new(cs?, fp0))
                };
                if let (Some(nu), Some(de)) = (lower(&num), lower(&den)) {
                    accept(RatFunc::from_parts(nu, de)?);
                }
            }
        }
    }
    roots.sort_by_key(|r| r.to_string());
    Ok(roots)
}

/// Up to two specialization points `τ` at which the leading coefficient is
/// nonzero and the specialized polynomial is squarefree, taken from the
/// smallest `F_{p^s}` offering at least `d + 1` such points.
fn good_points(big: &[Poly<Fp>], d: usize) -> Vec<Fq> {
    let p = big[0].proto().modulus();
    for s in 1..=12usize {
        if p.checked_pow(s as u32).is_none_or(|q| q > 1 << 16) {
            break;
        }
        let modulus = Fq::modulus(p, s);
        let mut good = Vec::new();
        for tau in Fq::elements(&modulus) {
            let spec: Vec<Fq> = big
                .iter()
                .map(|a| {
                    let mut acc = tau.zero_like();
                    for c in a.coeffs().iter().rev() {
                        acc = acc * tau.clone() + Fq::from_fp(*c, &modulus);
                    }
                    acc
                })
                .collect();
            if spec[d].is_zero() {
                continue;
            }
            let g = Poly::new(spec, tau.zero_like());
            if g.gcd(&g.derivative()).is_ok_and(|h| h.is_constant()) {
                good.push(tau);
            }
        }
        if good.len() > d {
            good.truncate(2);
            return good;
        }
    }
    Vec::new()
}
