use super::{Curve, CurvePoint};
use crate::dfield::{DiffField, Elem, Fp, RatFunc};
use crate::error::Result;
use crate::upoly::Poly;

/// Polynomials in `t` over `F_p` of degree at most `max_deg`, by degree
/// and then lexicographically in the coefficients.
pub fn poly_candidates(p: u64, max_deg: usize) -> Vec<Elem> {
    let zero = Fp::new(0, p);
    let mut out = Vec::new();
    let mut count = 1u64;
    for deg in 0..=max_deg {
        let prev = count;
        count *= p;
        for i in 0..count {
            if deg > 0 && i < prev {
                continue;
            }
            let mut coeffs = Vec::with_capacity(deg + 1);
            let mut v = i;
            for _ in 0..=deg {
                coeffs.push(Fp::from_u64(v % p, p));
                v /= p;
            }
            out.push(Elem::from_ratfunc(RatFunc::from_poly(Poly::new(coeffs, zero))));
        }
    }
    out
}

/// Affine points with `x` among `candidates` and `y` a square root in
/// `field`, at most `limit` of them (one per `x`, both signs skipped).
pub fn search_points(
    field: &DiffField,
    curve: &Curve<Elem>,
    candidates: impl IntoIterator<Item = Elem>,
    limit: usize,
) -> Result<Vec<CurvePoint<Elem>>> {
    let mut out = Vec::new();
    for x in candidates {
        if out.len() >= limit {
            break;
        }
        let rhs = curve.eval_rhs(&x);
        if let Some(y) = field.sqrt(&rhs)? {
            out.push(CurvePoint::Affine(x, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecurve::tests::curve_b;

    #[test]
    fn candidates_are_distinct() {
        let c = poly_candidates(3, 2);
        assert_eq!(c.len(), 27);
        for (i, a) in c.iter().enumerate() {
            assert!(!c[..i].contains(a));
        }
    }

    #[test]
    fn finds_known_points() {
        let k = DiffField::base(5).unwrap();
        let e = curve_b();
        let pts = search_points(&k, &e, poly_candidates(5, 0), 10).unwrap();
        // x ∈ {0, 2, 3}: f(x) = t²
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| e.is_on(p)));
    }
}
