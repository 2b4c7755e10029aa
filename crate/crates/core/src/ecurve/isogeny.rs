use super::{mult_by_n_x, mult_by_n_y_factor, Curve, CurvePoint};
use crate::dfield::{DiffField, Elem, Field, RatFunc};
use crate::error::{Error, Result};
use crate::hassewitt::hasse_invariant;
use crate::upoly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsogenyKind {
    Frobenius,
    Verschiebung,
    Other,
}

/// `(x, y) ↦ (u(x), y·w(x))`.
#[derive(Clone, Debug)]
pub struct Isogeny {
    pub source: Curve<Elem>,
    pub target: Curve<Elem>,
    pub u: RatFunc<Elem>,
    pub w: RatFunc<Elem>,
    pub kind: IsogenyKind,
}

fn compose(f: &Poly<Elem>, u: &RatFunc<Elem>) -> RatFunc<Elem> {
    let mut acc = u.zero_like();
    for c in f.coeffs().iter().rev() {
        acc = acc * u.clone() + RatFunc::constant(c.clone());
    }
    acc
}

impl Isogeny {
    pub fn apply(&self, pt: &CurvePoint<Elem>) -> Result<CurvePoint<Elem>> {
        let CurvePoint::Affine(x, y) = pt else {
            return Ok(CurvePoint::Infinity);
        };
        let Some(ux) = self.u.eval(x) else {
            return Ok(CurvePoint::Infinity);
        };
        let wx = self
            .w
            .eval(x)
            .ok_or_else(|| Error::StructureViolation("y-map has a pole off the kernel".into()))?;
        Ok(CurvePoint::Affine(ux, y.clone() * wx))
    }

    /// `w² · f_source = f_target ∘ u` as rational functions of `x`.
    pub fn check_invariant(&self) -> bool {
        let lhs = self.w.square() * RatFunc::from_poly(self.source.rhs());
        lhs == compose(&self.target.rhs(), &self.u)
    }
}

/// The Frobenius `E → E^{(p)}`.
pub fn frobenius(e: &Curve<Elem>) -> Isogeny {
    let p = e.characteristic();
    let proto = e.proto();
    Isogeny {
        source: e.clone(),
        target: e.frobenius_twist(),
        u: RatFunc::from_poly(Poly::monomial(proto.one_like(), p as usize)),
        w: RatFunc::from_poly(e.rhs().pow((p - 1) / 2)),
        kind: IsogenyKind::Frobenius,
    }
}

fn require_ordinary(e: &Curve<Elem>) -> Result<()> {
    if !hasse_invariant(e).ordinary {
        return Err(Error::NotOrdinary);
    }
    Ok(())
}

/// The `x`-coordinate of `[p]` in lowest terms.
pub fn mult_by_p_x(e: &Curve<Elem>) -> Result<RatFunc<Elem>> {
    require_ordinary(e)?;
    mult_by_n_x(e, e.characteristic() as usize)
}

/// The Verschiebung `E^{(p)} → E`, extracted from `[p] = V ∘ F`.
///
/// `field` must contain the coefficients of `e`; it supplies square roots
/// of leading coefficients.
pub fn verschiebung(field: &DiffField, e: &Curve<Elem>) -> Result<Isogeny> {
    let p = e.characteristic() as usize;
    let mp = mult_by_p_x(e)?;
    let violation = |what: &str| Error::StructureViolation(format!("{what} of [p]_x is not in K[x^p]"));
    let (c1, n) = mp
        .numer()
        .detect_p_power_substitution(p)
        .ok_or_else(|| violation("numerator"))?;
    let (c2, d) = mp
        .denom()
        .detect_p_power_substitution(p)
        .ok_or_else(|| violation("denominator"))?;
    let n = n.scale(&c1.div(&c2)?);
    let vx = RatFunc::from_parts(n.clone(), d.clone())?;

    // w² = f(V_x(X)) / f^{(p)}(X) = (G·d / f^{(p)}) / d⁴ with G = d³·f(n/d)
    let twist = e.frobenius_twist();
    let g = {
        // n³ + a₂n²d + a₄nd² + a₆d³
        let n2 = &n * &n;
        let d2 = &d * &d;
        &(&(&n2 * &n) + &(&n2 * &d).scale(&e.a2)) + &(&(&n * &d2).scale(&e.a4) + &(&d2 * &d).scale(&e.a6))
    };
    let w_sq = RatFunc::from_parts(&g * &d, twist.rhs())?;
    let lc_sqrt = |c: &Elem| field.sqrt(c);
    let not_square = || Error::StructureViolation("f(V_x)/f^(p) is not a square".into());
    let num_root = w_sq.numer().sqrt_with(lc_sqrt)?.ok_or_else(not_square)?;
    let den_root = w_sq.denom().sqrt_with(lc_sqrt)?.ok_or_else(not_square)?;
    let mut w = RatFunc::from_parts(num_root, &den_root * &(&d * &d))?;

    // V(F(x, y)) = (V_x(x^p), y·f(x)^{(p−1)/2}·w(x^p)) must equal [p](x, y) = (…, y·Ω(x))
    let (om_num, om_den) = mult_by_n_y_factor(e, p);
    let lhs_num = &e.rhs().pow((p as u64 - 1) / 2) * &w.numer().substitute_power(p);
    let lhs_den = w.denom().substitute_power(p);
    let a = &lhs_num * &om_den;
    let b = &lhs_den * &om_num;
    if a == -&b {
        w = -w;
    } else if a != b {
        return Err(Error::SignUndetermined);
    }
    Ok(Isogeny {
        source: twist,
        target: e.clone(),
        u: vx,
        w,
        kind: IsogenyKind::Verschiebung,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{curve_b, el, legendre};
    use super::*;

    fn field(p: u64) -> DiffField {
        DiffField::base(p).unwrap()
    }

    fn sample_points(e: &Curve<Elem>, p: u64) -> Vec<CurvePoint<Elem>> {
        let k = field(p);
        let mut found = Vec::new();
        for x in crate::ecurve::poly_candidates(p, 2) {
            if let Some(pt) = e.lift_x(&x, |a| k.sqrt(a)).unwrap() {
                found.push(pt);
            }
            if found.len() >= 3 {
                break;
            }
        }
        found
    }

    #[test]
    fn v_after_f_is_multiplication_by_p() {
        for (e, p) in [(legendre(3), 3u64), (curve_b(), 5), (legendre(5), 5)] {
            let v = verschiebung(&field(p), &e).unwrap();
            let f = frobenius(&e);
            assert!(v.check_invariant());
            assert!(f.check_invariant());
            let base = sample_points(&e, p);
            assert!(!base.is_empty());
            let mut pts = base.clone();
            pts.push(e.add(&base[0], &base[base.len() - 1]).unwrap());
            pts.push(e.smul(2, &base[0]).unwrap());
            for pt in &pts {
                let lhs = v.apply(&f.apply(pt).unwrap()).unwrap();
                assert_eq!(lhs, e.smul(p as i64, pt).unwrap());
            }
        }
    }

    #[test]
    fn verschiebung_degree_bookkeeping() {
        for p in [3u64, 5, 7] {
            let v = verschiebung(&field(p), &legendre(p)).unwrap();
            assert_eq!(v.u.numer().degree(), Some(p as usize));
            assert_eq!(v.u.denom().degree(), Some(p as usize - 1));
        }
    }

    #[test]
    fn supersingular_rejected() {
        let e = Curve::new(el("0", 3), el("1", 3), el("0", 3)).unwrap();
        assert_eq!(mult_by_p_x(&e).unwrap_err(), Error::NotOrdinary);
        assert_eq!(verschiebung(&field(3), &e).unwrap_err(), Error::NotOrdinary);
    }
}
