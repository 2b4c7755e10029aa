//! The Hasse-Witt invariant of `y² = f(x)`, ordinarity, and the étale
//! kernel of the Verschiebung.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::dfield::{check_odd_prime, DiffField, Elem, Field, Fp, RatFunc};
use crate::ecurve::{verschiebung, Curve, CurvePoint, Isogeny};
use crate::error::{Error, Result};
use crate::upoly::{rational_roots, Poly};

#[derive(Clone, Debug, PartialEq)]
pub struct HasseData<K: Field> {
    pub curve: Curve<K>,
    /// Coefficient of `x^{p−1}` in `f^{(p−1)/2}`.
    pub lambda_bar: K,
    pub ordinary: bool,
}

/// Hasse-Witt scalar of a curve in odd characteristic `p`.
pub fn hasse_invariant<K: Field>(e: &Curve<K>) -> HasseData<K> {
    let p = e.proto().characteristic();
    assert!(p > 2, "Hasse-Witt invariant needs odd characteristic");
    let lambda_bar = e.rhs().power_coeff((p - 1) / 2, (p - 1) as usize);
    HasseData {
        curve: e.clone(),
        ordinary: !lambda_bar.is_zero(),
        lambda_bar,
    }
}

fn binomial_mod(n: u64, k: u64, p: u64) -> Fp {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Fp::from_u64((acc % p).to_u64().expect("small residue"), p)
}

/// `(−1)^{(p−1)/2} Σ_{i ≤ (p−1)/2} C((p−1)/2, i)² tⁱ` over `F_p`.
pub fn hasse_polynomial_closed_form(p: u64) -> Result<Poly<Fp>> {
    check_odd_prime(p)?;
    let m = (p - 1) / 2;
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    let coeffs = (0..=m)
        .map(|i| {
            let b = binomial_mod(m, i, p);
            b * b * Fp::new(sign, p)
        })
        .collect();
    Ok(Poly::new(coeffs, Fp::new(0, p)))
}

/// The monic `g` of degree `(p−1)/2` with `ψ_p = c·g(x^p)`; its roots are
/// the `x`-coordinates of the nonzero points of `ker V` on `E^{(p)}`.
pub fn etale_kernel_poly(e: &Curve<Elem>) -> Result<Poly<Elem>> {
    if !hasse_invariant(e).ordinary {
        return Err(Error::NotOrdinary);
    }
    let p = e.characteristic();
    let (_, g) = crate::ecurve::division_poly(e, p as usize)
        .detect_p_power_substitution(p as usize)
        .ok_or_else(|| Error::StructureViolation("ψ_p is not of the form c·g(x^p)".into()))?;
    if g.degree() != Some(((p - 1) / 2) as usize) {
        return Err(Error::StructureViolation(format!(
            "étale kernel polynomial has degree {:?}, expected {}",
            g.degree(),
            (p - 1) / 2
        )));
    }
    Ok(g)
}

/// A nonzero point `S` of `ker V ⊂ E^{(p)}` and the field it is defined over.
#[derive(Clone, Debug)]
pub struct KernelData {
    pub g_poly: Poly<Elem>,
    pub field: DiffField,
    pub s: CurvePoint<Elem>,
    pub v: Isogeny,
}

fn base_poly(g: &Poly<Elem>, p: u64) -> Option<Poly<RatFunc<Fp>>> {
    let coeffs: Option<Vec<RatFunc<Fp>>> = g.coeffs().iter().map(|c| c.as_base().cloned()).collect();
    Some(Poly::new(coeffs?, RatFunc::constant(Fp::new(0, p))))
}

/// Builds `S = (x_S, y_S)` with `g(x_S) = 0`, adjoining square roots to
/// `field` as needed, and checks `V(S) = O` and `pS = O`.
pub fn kernel_point(field: &DiffField, e: &Curve<Elem>, deg_bound: usize) -> Result<KernelData> {
    let p = e.characteristic();
    let g = etale_kernel_poly(e)?;
    let v = verschiebung(field, e)?;
    let mut w = field.clone();
    let base = base_poly(&g, p);
    let root = match &base {
        Some(gb) => rational_roots(gb, deg_bound)?
            .into_iter()
            .next()
            .map(Elem::from_ratfunc),
        None => None,
    };
    let x_s = match root {
        Some(r) => r,
        None if g.degree() == Some(2) => {
            let (b, c) = (g.coeff(1), g.coeff(0));
            let disc = b.square() - c * b.from_int_like(4);
            let (w2, r) = w.with_sqrt(&disc)?;
            w = w2;
            (r - b).div(&w.constant(2))?
        }
        None => return Err(Error::NoRationalKernel),
    };
    let twist = e.frobenius_twist();
    let (w2, y_s) = w.with_sqrt(&twist.eval_rhs(&x_s))?;
    let s = CurvePoint::Affine(x_s, y_s);
    if !v.apply(&s)?.is_infinity() || !twist.smul(p as i64, &s)?.is_infinity() {
        return Err(Error::StructureViolation("kernel point is not killed by V".into()));
    }
    Ok(KernelData {
        g_poly: g,
        field: w2,
        s,
        v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecurve::tests::{curve, curve_b, el, legendre};

    #[test]
    fn legendre_invariants() {
        let h3 = hasse_invariant(&legendre(3));
        assert_eq!(h3.lambda_bar, el("2+2*t", 3));
        assert!(h3.ordinary);
        assert_eq!(hasse_invariant(&legendre(5)).lambda_bar, el("1+4*t+t^2", 5));
        assert!(!hasse_invariant(&curve("0", "1", "0", 3)).ordinary);
    }

    #[test]
    fn closed_form_matches() {
        for p in [3u64, 5, 7, 11, 13] {
            let closed = hasse_polynomial_closed_form(p).unwrap();
            let sign = if (p - 1) / 2 % 2 == 0 { 1 } else { -1 };
            assert_eq!(closed.coeff(0), Fp::new(sign, p));
            let lam = hasse_invariant(&legendre(p)).lambda_bar;
            assert_eq!(lam, Elem::from_ratfunc(RatFunc::from_poly(closed)));
        }
        assert_eq!(hasse_polynomial_closed_form(2), Err(Error::InvalidCharacteristic(2)));
    }

    #[test]
    fn kernel_polynomial_examples() {
        let g = etale_kernel_poly(&legendre(3)).unwrap();
        assert_eq!(g.coeffs(), &[el("t^2/(1+t)", 3), el("1", 3)]);
        for p in [3u64, 5, 7] {
            let g = etale_kernel_poly(&legendre(p)).unwrap();
            assert_eq!(g.degree(), Some(((p - 1) / 2) as usize));
        }
        assert_eq!(
            etale_kernel_poly(&curve("0", "1", "0", 3)).unwrap_err(),
            Error::NotOrdinary
        );
    }

    #[test]
    fn kernel_points() {
        let k3 = DiffField::base(3).unwrap();
        let kd = kernel_point(&k3, &legendre(3), 8).unwrap();
        assert_eq!(kd.s.x().unwrap(), &el("2*t^2/(1+t)", 3));
        assert!(kd.field.depth() <= 1);
        let k5 = DiffField::base(5).unwrap();
        let kd = kernel_point(&k5, &curve_b(), 8).unwrap();
        assert!(!kd.s.is_infinity());
        assert!(kd.v.apply(&kd.s).unwrap().is_infinity());
    }
}
