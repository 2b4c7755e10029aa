//! Miller functions `f_{m,T}` with divisor `m(T) − ([m]T) − (m−1)(O)`,
//! evaluated at points through chord-and-tangent line values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Curve, CurvePoint};
use crate::dfield::Field;
use crate::error::{Error, Result};

/// Number of auxiliary shifts tried before giving up on a support collision.
pub const MILLER_RETRIES: usize = 16;

/// Value at `x` of the line through `a` and `b` divided by the vertical
/// through `a + b`, as a numerator/denominator pair, together with `a + b`.
fn line_ratio<K: Field>(
    e: &Curve<K>,
    a: &CurvePoint<K>,
    b: &CurvePoint<K>,
    xq: &K,
    yq: &K,
) -> Result<(K, K, CurvePoint<K>)> {
    let (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) = (a, b) else {
        return Err(Error::StructureViolation("Miller loop met the identity early".into()));
    };
    let one = xq.one_like();
    if x1 == x2 && (y1.clone() + y2.clone()).is_zero() {
        let l = xq.clone() - x1.clone();
        if l.is_zero() {
            return Err(Error::SupportCollision);
        }
        return Ok((l, one, CurvePoint::Infinity));
    }
    let lambda = if x1 == x2 {
        e.tangent_slope(x1, y1)?
    } else {
        (y2.clone() - y1.clone()).div(&(x2.clone() - x1.clone()))?
    };
    let x3 = lambda.square() - e.a2.clone() - x1.clone() - x2.clone();
    let y3 = lambda.clone() * (x1.clone() - x3.clone()) - y1.clone();
    let l = yq.clone() - y1.clone() - lambda * (xq.clone() - x1.clone());
    let v = xq.clone() - x3.clone();
    if l.is_zero() || v.is_zero() {
        return Err(Error::SupportCollision);
    }
    Ok((l, v, CurvePoint::Affine(x3, y3)))
}

/// `f_{m,T}(X)` by double-and-add. Fails with [`Error::SupportCollision`]
/// when `X` meets a zero or pole of one of the line functions.
pub fn miller_value<K: Field>(e: &Curve<K>, t: &CurvePoint<K>, m: u64, x: &CurvePoint<K>) -> Result<K> {
    let CurvePoint::Affine(xq, yq) = x else {
        return Err(Error::SupportCollision);
    };
    assert!(m >= 1);
    let mut num = xq.one_like();
    let mut den = xq.one_like();
    let mut acc = t.clone();
    let bits = 64 - m.leading_zeros();
    for i in (0..bits - 1).rev() {
        let (l, v, doubled) = line_ratio(e, &acc, &acc, xq, yq)?;
        num = num.square() * l;
        den = den.square() * v;
        acc = doubled;
        if (m >> i) & 1 == 1 {
            let (l, v, sum) = line_ratio(e, &acc, t, xq, yq)?;
            num = num * l;
            den = den * v;
            acc = sum;
        }
    }
    num.div(&den)
}

/// Deterministic stream of auxiliary points: random `{−1, 0, 1}`
/// combinations of a fixed pool, driven by a seeded ChaCha generator.
#[derive(Clone, Debug)]
pub struct ShiftSource<K: Field> {
    curve: Curve<K>,
    pool: Vec<CurvePoint<K>>,
    rng: ChaCha8Rng,
}

impl<K: Field> ShiftSource<K> {
    pub fn new(curve: Curve<K>, pool: Vec<CurvePoint<K>>, seed: u64) -> ShiftSource<K> {
        ShiftSource {
            curve,
            pool,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn pool(&self) -> &[CurvePoint<K>] {
        &self.pool
    }

    pub fn next_point(&mut self) -> Result<CurvePoint<K>> {
        if self.pool.is_empty() {
            return Err(Error::SupportCollision);
        }
        for _ in 0..64 {
            let mut r = CurvePoint::Infinity;
            for pt in &self.pool {
                let c: i64 = self.rng.gen_range(-1..=1);
                if c != 0 {
                    r = self.curve.add(&r, &self.curve.smul(c, pt)?)?;
                }
            }
            if !r.is_infinity() {
                return Ok(r);
            }
        }
        Err(Error::SupportCollision)
    }
}

/// `f_{m,T}(Q + R) / f_{m,T}(R)` for the first shift `R` from `shifts`
/// avoiding the support, within [`MILLER_RETRIES`] attempts. Returns the
/// value and the shift used.
pub fn miller_eval<K: Field>(
    e: &Curve<K>,
    t: &CurvePoint<K>,
    m: u64,
    q: &CurvePoint<K>,
    shifts: &mut ShiftSource<K>,
) -> Result<(K, CurvePoint<K>)> {
    for _ in 0..MILLER_RETRIES {
        let r = shifts.next_point()?;
        match miller_eval_with(e, t, m, q, &r) {
            Ok(v) => return Ok((v, r)),
            Err(Error::SupportCollision) => continue,
            Err(err) => return Err(err),
        }
    }
    Err(Error::SupportCollision)
}

/// `f_{m,T}(Q + R) / f_{m,T}(R)` for one fixed shift `R`.
pub fn miller_eval_with<K: Field>(
    e: &Curve<K>,
    t: &CurvePoint<K>,
    m: u64,
    q: &CurvePoint<K>,
    r: &CurvePoint<K>,
) -> Result<K> {
    let qr = e.add(q, r)?;
    let a = miller_value(e, t, m, &qr)?;
    let b = miller_value(e, t, m, r)?;
    a.div(&b)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{curve_b, el};
    use super::*;
    use crate::dfield::Elem;

    fn pts() -> (CurvePoint<Elem>, CurvePoint<Elem>) {
        (
            CurvePoint::Affine(el("0", 5), el("t", 5)),
            CurvePoint::Affine(el("2", 5), el("t", 5)),
        )
    }

    #[test]
    fn trivial_loop_is_one() {
        let e = curve_b();
        let (p, q) = pts();
        assert!(miller_value(&e, &p, 1, &q).unwrap().is_one());
    }

    #[test]
    fn divisor_of_two_torsion_function() {
        // for T = (x₀, 0), f_{2,T} is the vertical x − x₀
        let e = Curve::new(el("-(1+t)", 5), el("t", 5), el("0", 5)).unwrap();
        let t = CurvePoint::Affine(el("t", 5), el("0", 5));
        let q = CurvePoint::Affine(el("1", 5), el("0", 5));
        assert_eq!(miller_value(&e, &t, 2, &q).unwrap(), el("1-t", 5));
        assert_eq!(miller_value(&e, &t, 2, &t), Err(Error::SupportCollision));
    }

    #[test]
    fn shifted_evaluation_of_a_vertical() {
        let e = Curve::new(el("-(1+t)", 7), el("t", 7), el("0", 7)).unwrap();
        let t = CurvePoint::Affine(el("0", 7), el("0", 7));
        let k = crate::dfield::DiffField::base(7).unwrap();
        let w = k.adjoin_sqrt(&el("-2*(1+t)", 7)).unwrap();
        let q = CurvePoint::Affine(el("-1", 7), w.gen().unwrap());
        assert!(e.is_on(&q));
        let pool = vec![
            CurvePoint::Affine(el("1", 7), el("0", 7)),
            e.smul(2, &q).unwrap(),
            e.smul(3, &q).unwrap(),
        ];
        let mut shifts = ShiftSource::new(e.clone(), pool, 3);
        for _ in 0..3 {
            let (v, r) = miller_eval(&e, &t, 2, &q, &mut shifts).unwrap();
            let qr = e.add(&q, &r).unwrap();
            let expected = qr.x().unwrap().div(r.x().unwrap()).unwrap();
            assert_eq!(v, expected);
        }
    }
}
