//! Elliptic curves `y² = x³ + a₂x² + a₄x + a₆` and their points.

use std::fmt;

use crate::dfield::{DiffField, Elem, Field};
use crate::error::{Error, Result};
use crate::upoly::Poly;

mod divpoly;
mod isogeny;
mod miller;
mod search;

pub use divpoly::{division_poly, division_polys, mult_by_n_x, mult_by_n_y_factor};
pub use isogeny::{frobenius, mult_by_p_x, verschiebung, Isogeny, IsogenyKind};
pub use miller::{miller_eval, miller_eval_with, miller_value, ShiftSource, MILLER_RETRIES};
pub use search::{poly_candidates, search_points};

#[derive(Clone, Debug, PartialEq)]
pub struct Curve<K: Field> {
    pub a2: K,
    pub a4: K,
    pub a6: K,
}

/// A curve over a tower field `F_p(t)(u₁)…`.
pub type WeierstrassCurve = Curve<Elem>;

#[derive(Clone, Debug, PartialEq)]
pub enum CurvePoint<K: Field> {
    Infinity,
    Affine(K, K),
}

impl<K: Field> CurvePoint<K> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&K> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&K> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(_, y) => Some(y),
        }
    }

    pub fn map<L: Field>(&self, f: impl Fn(&K) -> L) -> CurvePoint<L> {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(f(x), f(y)),
        }
    }
}

impl<K: Field> fmt::Display for CurvePoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

impl<K: Field> Curve<K> {
    /// Validates that the model is nonsingular and the characteristic is not 2.
    pub fn new(a2: K, a4: K, a6: K) -> Result<Curve<K>> {
        if a2.characteristic() == 2 {
            return Err(Error::InvalidCharacteristic(2));
        }
        let e = Curve { a2, a4, a6 };
        if e.discriminant().is_zero() {
            return Err(Error::Validation(format!("singular curve {e}")));
        }
        Ok(e)
    }

    pub fn proto(&self) -> &K {
        &self.a2
    }

    /// `f(x) = x³ + a₂x² + a₄x + a₆`.
    pub fn rhs(&self) -> Poly<K> {
        let one = self.a2.one_like();
        Poly::new(
            vec![self.a6.clone(), self.a4.clone(), self.a2.clone(), one],
            self.a2.zero_like(),
        )
    }

    pub fn eval_rhs(&self, x: &K) -> K {
        ((x.clone() + self.a2.clone()) * x.clone() + self.a4.clone()) * x.clone() + self.a6.clone()
    }

    /// `(b₂, b₄, b₆, b₈)`.
    pub fn b_invariants(&self) -> (K, K, K, K) {
        let k = |n: i64| self.a2.from_int_like(n);
        let b2 = k(4) * self.a2.clone();
        let b4 = k(2) * self.a4.clone();
        let b6 = k(4) * self.a6.clone();
        let b8 = k(4) * self.a2.clone() * self.a6.clone() - self.a4.square();
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> K {
        let (b2, b4, b6, b8) = self.b_invariants();
        let k = |n: i64| self.a2.from_int_like(n);
        -(b2.square() * b8.clone()) - k(8) * b4.pow(3) - k(27) * b6.square() + k(9) * b2 * b4 * b6
    }

    pub fn is_on(&self, p: &CurvePoint<K>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => y.square() == self.eval_rhs(x),
        }
    }

    /// The point with coordinate `x`, if `f(x)` has a square root `y` in
    /// the supplied oracle.
    pub fn lift_x(&self, x: &K, sqrt: impl Fn(&K) -> Result<Option<K>>) -> Result<Option<CurvePoint<K>>> {
        Ok(sqrt(&self.eval_rhs(x))?.map(|y| CurvePoint::Affine(x.clone(), y)))
    }

    pub fn neg(&self, p: &CurvePoint<K>) -> CurvePoint<K> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), -y.clone()),
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        let (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) = (p, q) else {
            return Ok(if p.is_infinity() { q.clone() } else { p.clone() });
        };
        let lambda = if x1 == x2 {
            if (y1.clone() + y2.clone()).is_zero() {
                return Ok(CurvePoint::Infinity);
            }
            self.tangent_slope(x1, y1)?
        } else {
            (y2.clone() - y1.clone()).div(&(x2.clone() - x1.clone()))?
        };
        let x3 = lambda.square() - self.a2.clone() - x1.clone() - x2.clone();
        let y3 = lambda * (x1.clone() - x3.clone()) - y1.clone();
        Ok(CurvePoint::Affine(x3, y3))
    }

    pub(crate) fn tangent_slope(&self, x: &K, y: &K) -> Result<K> {
        let k = |n: i64| x.from_int_like(n);
        let num = k(3) * x.square() + k(2) * self.a2.clone() * x.clone() + self.a4.clone();
        num.div(&(k(2) * y.clone()))
    }

    pub fn sub(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        self.add(p, &self.neg(q))
    }

    pub fn double(&self, p: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        self.add(p, p)
    }

    /// `[n]P` by double-and-add; negative `n` negates.
    pub fn smul(&self, n: i64, p: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        let mut acc = CurvePoint::Infinity;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut m = n.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            m >>= 1;
            if m > 0 {
                base = self.double(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn map<L: Field>(&self, f: impl Fn(&K) -> L) -> Curve<L> {
        Curve {
            a2: f(&self.a2),
            a4: f(&self.a4),
            a6: f(&self.a6),
        }
    }
}

impl Curve<Elem> {
    pub fn characteristic(&self) -> u64 {
        self.a2.p()
    }

    /// The curve `E^{(p)}` with coefficients `a_i^p`.
    pub fn frobenius_twist(&self) -> Curve<Elem> {
        let p = self.characteristic();
        self.map(|a| a.pow(p))
    }

    /// `(x, y) ↦ (x^p, y^p)`, landing on the Frobenius twist.
    pub fn point_frobenius(&self, pt: &CurvePoint<Elem>) -> CurvePoint<Elem> {
        let p = self.characteristic();
        pt.map(|a| a.pow(p))
    }

    /// Whether all coefficients lie in `field`.
    pub fn defined_over(&self, field: &DiffField) -> bool {
        [&self.a2, &self.a4, &self.a6].iter().all(|a| field.contains(a))
    }
}

impl<K: Field> fmt::Display for Curve<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})*x^2 + ({})*x + ({})", self.a2, self.a4, self.a6)
    }
}
