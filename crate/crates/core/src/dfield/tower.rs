//! Towers of simple separable extensions of `F_p(t)` carrying the unique
//! extension of `d/dt`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{check_odd_prime, Differential, Field, Fp, RatFunc, SqrtField};
use crate::error::{Error, Result};
use crate::upoly::Poly;

/// One extension layer `L = L'[u]/(m(u))`.
pub struct Layer {
    depth: usize,
    p: u64,
    /// Monic minimal polynomial, lowest coefficient first, over the layer below.
    minpoly: Vec<Elem>,
    /// Coefficients of the reduced representative of `δu`.
    du: Vec<Elem>,
    below: Option<Arc<Layer>>,
}

impl Layer {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn name(&self) -> String {
        format!("u{}", self.depth)
    }

    pub fn minpoly(&self) -> &[Elem] {
        &self.minpoly
    }

    pub fn below(&self) -> Option<&Arc<Layer>> {
        self.below.as_ref()
    }

    /// `Some(D)` when the minimal polynomial is `u² − D`.
    pub fn pure_square(&self) -> Option<Elem> {
        (self.degree() == 2 && self.minpoly[1].is_zero()).then(|| -self.minpoly[0].clone())
    }
}

impl fmt::Debug for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = Poly::new(self.minpoly.clone(), Elem::zero(self.p));
        write!(f, "Layer({} : {})", self.name(), m.fmt_var(&self.name()))
    }
}

/// Element of a tower, stored at the lowest layer containing it.
#[derive(Clone)]
pub enum Elem {
    Base(RatFunc<Fp>),
    /// Residue `Σ coeffs[i]·u^i` with `2 ≤ coeffs.len() ≤ deg m` and a
    /// nonzero top coefficient.
    Ext(Arc<Layer>, Vec<Elem>),
}

impl Elem {
    pub fn zero(p: u64) -> Elem {
        Elem::Base(RatFunc::from_poly(Poly::zero(&Fp::new(0, p))))
    }

    pub fn from_ratfunc(a: RatFunc<Fp>) -> Elem {
        Elem::Base(a)
    }

    pub fn p(&self) -> u64 {
        match self {
            Elem::Base(a) => a.modulus(),
            Elem::Ext(l, _) => l.p,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Elem::Base(_) => 0,
            Elem::Ext(l, _) => l.depth,
        }
    }

    pub fn layer(&self) -> Option<&Arc<Layer>> {
        match self {
            Elem::Base(_) => None,
            Elem::Ext(l, _) => Some(l),
        }
    }

    /// The underlying element of `F_p(t)`, if the element lies there.
    pub fn as_base(&self) -> Option<&RatFunc<Fp>> {
        match self {
            Elem::Base(a) => Some(a),
            Elem::Ext(..) => None,
        }
    }

    /// Builds `Σ coeffs[i]·u^i` in `layer`, reducing and demoting.
    pub fn from_coeffs(layer: &Arc<Layer>, mut v: Vec<Elem>) -> Elem {
        let n = layer.degree();
        for k in (n..v.len()).rev() {
            let c = v[k].clone();
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                v[k - n + i] = v[k - n + i].clone() - c.clone() * layer.minpoly[i].clone();
            }
        }
        v.truncate(n);
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        match v.len() {
            0 => Elem::zero(layer.p),
            1 => v.pop().expect("one coefficient"),
            _ => Elem::Ext(layer.clone(), v),
        }
    }

    /// Coefficient vector of `self` viewed in `layer` (length `deg m`).
    fn coeffs_in(&self, layer: &Arc<Layer>) -> Vec<Elem> {
        let n = layer.degree();
        let mut v = match self {
            Elem::Ext(l, c) if l.depth == layer.depth => {
                assert!(Arc::ptr_eq(l, layer), "elements from unrelated towers");
                c.clone()
            }
            _ => {
                debug_assert!(self.depth() < layer.depth);
                vec![self.clone()]
            }
        };
        v.resize(n, Elem::zero(layer.p));
        v
    }

    fn top_layer<'a>(a: &'a Elem, b: &'a Elem) -> Option<&'a Arc<Layer>> {
        if a.depth() >= b.depth() {
            a.layer()
        } else {
            b.layer()
        }
    }

    fn fmt_inner(&self) -> String {
        match self {
            Elem::Base(a) => a.to_string(),
            Elem::Ext(l, c) => {
                let name = l.name();
                let mut terms = Vec::new();
                for (i, a) in c.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let s = a.fmt_inner();
                    let s = if s.contains(['+', '-', '/']) && (i > 0 || c.len() > 1) {
                        format!("({s})")
                    } else {
                        s
                    };
                    terms.push(match i {
                        0 => s,
                        1 if a.is_one() => name.clone(),
                        1 => format!("{s}*{name}"),
                        _ if a.is_one() => format!("{name}^{i}"),
                        _ => format!("{s}*{name}^{i}"),
                    });
                }
                terms.join("+")
            }
        }
    }
}

impl PartialEq for Elem {
    fn eq(&self, other: &Elem) -> bool {
        match (self, other) {
            (Elem::Base(a), Elem::Base(b)) => a == b,
            (Elem::Ext(la, ca), Elem::Ext(lb, cb)) => Arc::ptr_eq(la, lb) && ca == cb,
            _ => false,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_inner())
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_inner())
    }
}

impl Add for Elem {
    type Output = Elem;
    fn add(self, rhs: Elem) -> Elem {
        if let (Elem::Base(a), Elem::Base(b)) = (&self, &rhs) {
            return Elem::Base(a.clone() + b.clone());
        }
        let layer = Elem::top_layer(&self, &rhs).expect("extension element").clone();
        let a = self.coeffs_in(&layer);
        let b = rhs.coeffs_in(&layer);
        let v = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        Elem::from_coeffs(&layer, v)
    }
}

impl Sub for Elem {
    type Output = Elem;
    fn sub(self, rhs: Elem) -> Elem {
        self + (-rhs)
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        match self {
            Elem::Base(a) => Elem::Base(-a),
            Elem::Ext(l, c) => Elem::Ext(l, c.into_iter().map(|x| -x).collect()),
        }
    }
}

impl Mul for Elem {
    type Output = Elem;
    fn mul(self, rhs: Elem) -> Elem {
        match (self, rhs) {
            (Elem::Base(a), Elem::Base(b)) => Elem::Base(a * b),
            (a, b) if a.is_zero() || b.is_zero() => Elem::zero(a.p()),
            (a, b) if a.depth() != b.depth() => {
                let (hi, lo) = if a.depth() > b.depth() { (a, b) } else { (b, a) };
                let Elem::Ext(l, c) = hi else { unreachable!() };
                let v = c.into_iter().map(|x| x * lo.clone()).collect();
                Elem::from_coeffs(&l, v)
            }
            (Elem::Ext(la, ca), Elem::Ext(lb, cb)) => {
                assert!(Arc::ptr_eq(&la, &lb), "elements from unrelated towers");
                let mut v = vec![Elem::zero(la.p); ca.len() + cb.len() - 1];
                for (i, x) in ca.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        v[i + j] = v[i + j].clone() + x.clone() * y.clone();
                    }
                }
                Elem::from_coeffs(&la, v)
            }
            _ => unreachable!(),
        }
    }
}

impl Field for Elem {
    fn zero_like(&self) -> Elem {
        Elem::zero(self.p())
    }

    fn one_like(&self) -> Elem {
        Elem::Base(RatFunc::constant(Fp::new(1, self.p())))
    }

    fn from_int_like(&self, n: i64) -> Elem {
        Elem::Base(RatFunc::constant(Fp::new(n, self.p())))
    }

    fn is_zero(&self) -> bool {
        match self {
            Elem::Base(a) => a.is_zero(),
            Elem::Ext(..) => false,
        }
    }

    fn inv(&self) -> Result<Elem> {
        match self {
            Elem::Base(a) => Ok(Elem::Base(a.inv()?)),
            Elem::Ext(l, c) => {
                if let Some(d) = l.pure_square() {
                    // (a + bu)⁻¹ = (a − bu)/(a² − b²D)
                    let norm = c[0].square() - c[1].square() * d;
                    if norm.is_zero() {
                        return Err(Error::ZeroDivisor);
                    }
                    let ninv = norm.inv()?;
                    return Ok(Elem::from_coeffs(
                        l,
                        vec![c[0].clone() * ninv.clone(), -(c[1].clone() * ninv)],
                    ));
                }
                let zero = Elem::zero(l.p);
                let a = Poly::new(c.clone(), zero.clone());
                let m = Poly::new(l.minpoly.clone(), zero);
                let (g, s, _) = a.gcdex(&m)?;
                if g.degree() != Some(0) {
                    return Err(Error::ZeroDivisor);
                }
                Ok(Elem::from_coeffs(l, s.into_coeffs()))
            }
        }
    }

    fn characteristic(&self) -> u64 {
        self.p()
    }
}

impl Differential for Elem {
    fn derive(&self) -> Elem {
        match self {
            Elem::Base(a) => Elem::Base(a.derive()),
            Elem::Ext(l, c) => {
                let coeff_part = Elem::from_coeffs(l, c.iter().map(|x| x.derive()).collect());
                let formal: Vec<Elem> = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, x)| x.clone() * x.from_int_like(i as i64))
                    .collect();
                let du = Elem::from_coeffs(l, l.du.clone());
                coeff_part + Elem::from_coeffs(l, formal) * du
            }
        }
    }
}

/// A differential field `F_p(t)(u_1)…(u_k)` with `δ = d/dt` extended to
/// each layer.
#[derive(Clone, Debug)]
pub struct DiffField {
    p: u64,
    top: Option<Arc<Layer>>,
}

impl PartialEq for DiffField {
    fn eq(&self, other: &DiffField) -> bool {
        self.p == other.p
            && match (&self.top, &other.top) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b),
                _ => false,
            }
    }
}

impl DiffField {
    /// `F_p(t)` with `δ = d/dt`.
    pub fn base(p: u64) -> Result<DiffField> {
        check_odd_prime(p)?;
        Ok(DiffField { p, top: None })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.top.as_ref().map_or(0, |l| l.depth)
    }

    pub fn top(&self) -> Option<&Arc<Layer>> {
        self.top.as_ref()
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(self.p)
    }

    pub fn one(&self) -> Elem {
        self.constant(1)
    }

    pub fn constant(&self, n: i64) -> Elem {
        Elem::Base(RatFunc::constant(Fp::new(n, self.p)))
    }

    pub fn t(&self) -> Elem {
        Elem::Base(RatFunc::var(&Fp::new(0, self.p)))
    }

    pub fn elem(&self, a: RatFunc<Fp>) -> Elem {
        Elem::Base(a)
    }

    /// Generator of the top layer.
    pub fn gen(&self) -> Option<Elem> {
        let l = self.top.as_ref()?;
        Some(Elem::from_coeffs(l, vec![self.zero(), self.one()]))
    }

    /// Whether `a` lies in this field.
    pub fn contains(&self, a: &Elem) -> bool {
        let Some(la) = a.layer() else {
            return a.p() == self.p;
        };
        let mut cur = self.top.as_ref();
        while let Some(l) = cur {
            if Arc::ptr_eq(l, la) {
                return true;
            }
            cur = l.below.as_ref();
        }
        false
    }

    /// Adjoins a root of the separable polynomial `m` (irreducibility is the
    /// caller's responsibility and is policed lazily through
    /// [`Error::ZeroDivisor`]).
    pub fn adjoin_root(&self, m: &Poly<Elem>) -> Result<DiffField> {
        let m = m.monic()?;
        let n = m.degree().ok_or(Error::DivisionByZero)?;
        if n < 2 {
            return Err(Error::Unsupported("layers must have degree at least 2".into()));
        }
        if m.coeffs().iter().any(|c| !self.contains(c)) {
            return Err(Error::Unsupported("minimal polynomial outside the field".into()));
        }
        if m.derivative().is_zero() {
            return Err(Error::NotSeparable);
        }
        let depth = self.depth() + 1;
        let scratch = Arc::new(Layer {
            depth,
            p: self.p,
            minpoly: m.coeffs().to_vec(),
            du: vec![self.zero(); n],
            below: self.top.clone(),
        });
        let eval_at_u = |coeffs: Vec<Elem>| Elem::from_coeffs(&scratch, coeffs);
        let m_delta = eval_at_u(m.coeffs().iter().map(|c| c.derive()).collect());
        let m_prime = eval_at_u(m.derivative().into_coeffs());
        let du = -(m_delta * m_prime.inv()?);
        let du = du.coeffs_in(&scratch);
        let layer = Arc::new(Layer {
            depth,
            p: self.p,
            minpoly: m.into_coeffs(),
            du,
            below: self.top.clone(),
        });
        Ok(DiffField {
            p: self.p,
            top: Some(layer),
        })
    }

    /// Adjoins `u` with `u² = d`.
    pub fn adjoin_sqrt(&self, d: &Elem) -> Result<DiffField> {
        let m = Poly::new(vec![-d.clone(), self.zero(), self.one()], self.zero());
        self.adjoin_root(&m)
    }

    /// Square root within this field.
    pub fn sqrt(&self, a: &Elem) -> Result<Option<Elem>> {
        sqrt_at(self.top.as_ref(), a)
    }

    /// Returns a field containing a square root of `a` together with that
    /// root, adjoining one quadratic layer if needed.
    pub fn with_sqrt(&self, a: &Elem) -> Result<(DiffField, Elem)> {
        if let Some(r) = self.sqrt(a)? {
            return Ok((self.clone(), r));
        }
        if let Elem::Base(b) = a {
            let (d, s) = b.square_class()?;
            let w = self.adjoin_sqrt(&Elem::Base(RatFunc::from_poly(d)))?;
            let u = w.gen().expect("new layer");
            return Ok((w, u * Elem::Base(s)));
        }
        let w = self.adjoin_sqrt(a)?;
        let u = w.gen().expect("new layer");
        Ok((w, u))
    }
}

fn sqrt_at(layer: Option<&Arc<Layer>>, a: &Elem) -> Result<Option<Elem>> {
    let Some(l) = layer else {
        return match a {
            Elem::Base(b) => Ok(b.sqrt()?.map(Elem::Base)),
            Elem::Ext(..) => Err(Error::Unsupported("element outside the field".into())),
        };
    };
    let below = l.below.as_ref();
    if a.depth() < l.depth {
        if let Some(r) = sqrt_at(below, a)? {
            return Ok(Some(r));
        }
        return match l.pure_square() {
            Some(d) => {
                let u = Elem::from_coeffs(l, vec![a.zero_like(), a.one_like()]);
                Ok(sqrt_at(below, &a.div(&d)?)?.map(|z| z * u))
            }
            None if l.degree() % 2 == 1 => Ok(None),
            None => Err(Error::Unsupported("square roots through non-quadratic layers".into())),
        };
    }
    let Some(d) = l.pure_square() else {
        return Err(Error::Unsupported("square roots in non-pure quadratic layers".into()));
    };
    let c = a.coeffs_in(l);
    let (x, y) = (c[0].clone(), c[1].clone());
    let norm = x.square() - y.square() * d;
    let Some(n) = sqrt_at(below, &norm)? else {
        return Ok(None);
    };
    let half = a.from_int_like(2).inv()?;
    for s in [n.clone(), -n] {
        let h = (x.clone() + s) * half.clone();
        if let Some(c0) = sqrt_at(below, &h)? {
            if c0.is_zero() {
                continue;
            }
            let e = y.div(&(c0.clone() * a.from_int_like(2)))?;
            let cand = Elem::from_coeffs(l, vec![c0, e]);
            if &cand.square() == a {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfield::{parse_expr, reduce_mod_p};
    use proptest::prelude::*;

    fn rf(s: &str, p: u64) -> Elem {
        Elem::Base(reduce_mod_p(&parse_expr(s).unwrap().eval_rational().unwrap(), p).unwrap())
    }

    #[test]
    fn sqrt_of_t_layer() {
        let k = DiffField::base(3).unwrap();
        let w = k.adjoin_sqrt(&k.t()).unwrap();
        let u = w.gen().unwrap();
        assert_eq!(u.square(), k.t());
        // δu = 1/(2u)
        let expected = (u.clone() * k.constant(2)).inv().unwrap();
        assert_eq!(u.derive(), expected);
        assert_eq!(u.derive() * u.clone() * k.constant(2), k.one());
    }

    #[test]
    fn inseparable_layer_rejected() {
        let k = DiffField::base(3).unwrap();
        let m = Poly::new(vec![-k.t(), k.zero(), k.zero(), k.one()], k.zero());
        assert_eq!(k.adjoin_root(&m).unwrap_err(), Error::NotSeparable);
    }

    #[test]
    fn defining_relation_holds() {
        let k = DiffField::base(3).unwrap();
        let d = rf("t+1", 3);
        let w = k.adjoin_sqrt(&d).unwrap();
        let u = w.gen().unwrap();
        assert!((u.square() - d.clone()).is_zero());
        // δ(u² − (t+1)) = 2u·δu − 1 = 0
        assert!((u.clone() * u.derive() * k.constant(2) - k.one()).is_zero());
    }

    #[test]
    fn reducible_layer_surfaces_zero_divisor() {
        let k = DiffField::base(5).unwrap();
        let w = k.adjoin_sqrt(&rf("t^2", 5)).unwrap();
        let u = w.gen().unwrap();
        let z = u - k.t();
        assert_eq!(z.inv().unwrap_err(), Error::ZeroDivisor);
    }

    #[test]
    fn tower_square_roots() {
        let k = DiffField::base(5).unwrap();
        let w = k.adjoin_sqrt(&rf("t", 5)).unwrap();
        let u = w.gen().unwrap();
        // t is a square in the extension, and so is (1+u)²
        assert_eq!(w.sqrt(&k.t()).unwrap().unwrap().square(), k.t());
        let a = (k.one() + u.clone()).square();
        assert_eq!(w.sqrt(&a).unwrap().unwrap().square(), a);
        assert!(w.sqrt(&u).unwrap().is_none());
        let (w2, r) = w.with_sqrt(&u).unwrap();
        assert_eq!(w2.depth(), 2);
        assert_eq!(r.square(), u);
        // δ stays consistent at depth 2
        let r2 = r.square();
        assert_eq!(r2.derive(), r.derive() * r.clone() * k.constant(2));
    }

    #[test]
    fn depth_two_arithmetic() {
        let k = DiffField::base(7).unwrap();
        let w1 = k.adjoin_sqrt(&rf("t", 7)).unwrap();
        let u = w1.gen().unwrap();
        let w2 = w1.adjoin_sqrt(&(u.clone() + k.one())).unwrap();
        let v = w2.gen().unwrap();
        let a = v.clone() * u.clone() + k.t();
        let b = a.inv().unwrap();
        assert!((a.clone() * b).is_one());
        assert!(w2.contains(&a) && !w1.contains(&v));
    }

    proptest! {
        #[test]
        fn leibniz_in_extension(c in prop::collection::vec(-3i64..4, 4)) {
            let k = DiffField::base(5).unwrap();
            let w = k.adjoin_sqrt(&rf("t^2+1", 5)).unwrap();
            let u = w.gen().unwrap();
            let a = k.constant(c[0]) * k.t() + u.clone() * k.constant(c[1]);
            let b = k.constant(c[2]) + u * k.t().pow(2) * k.constant(c[3]);
            prop_assert_eq!((a.clone() * b.clone()).derive(), a.derive() * b.clone() + a * b.derive());
        }
    }
}
