//! Division polynomials in the reduced normalization: `ψ̃_m = ψ_m` for odd
//! `m` and `ψ̃_m = ψ_m / (2y)` for even `m`, so every `ψ̃_m` lies in `K[x]`.

use super::Curve;
use crate::dfield::{Field, RatFunc};
use crate::error::Result;
use crate::upoly::Poly;

/// `[ψ̃_0, …, ψ̃_n]`.
pub fn division_polys<K: Field>(e: &Curve<K>, n: usize) -> Vec<Poly<K>> {
    let proto = e.proto();
    let k = |n: i64| proto.from_int_like(n);
    let (b2, b4, b6, b8) = e.b_invariants();
    let mut psi = vec![
        Poly::zero(proto),
        Poly::one(proto),
        Poly::one(proto),
        Poly::new(
            vec![b8.clone(), k(3) * b6.clone(), k(3) * b4.clone(), b2.clone(), k(3)],
            proto.zero_like(),
        ),
        Poly::new(
            vec![
                b4.clone() * b8.clone() - b6.square(),
                b2.clone() * b8.clone() - b4.clone() * b6.clone(),
                k(10) * b8,
                k(10) * b6,
                k(5) * b4,
                b2,
                k(2),
            ],
            proto.zero_like(),
        ),
    ];
    // (2y)^4 = (4f)^2
    let f4 = e.rhs().scale(&k(4));
    let f4sq = &f4 * &f4;
    for m in 5..=n {
        let h = m / 2;
        let next = if m % 2 == 1 {
            let a = &psi[h + 2] * &psi[h].pow(3);
            let b = &psi[h - 1] * &psi[h + 1].pow(3);
            if h % 2 == 0 {
                &(&a * &f4sq) - &b
            } else {
                &a - &(&b * &f4sq)
            }
        } else {
            let inner = &(&psi[h + 2] * &psi[h - 1].pow(2)) - &(&psi[h - 2] * &psi[h + 1].pow(2));
            &psi[h] * &inner
        };
        psi.push(next);
    }
    psi.truncate(n + 1);
    psi
}

/// `ψ̃_m` (equal to `ψ_m` for odd `m`).
pub fn division_poly<K: Field>(e: &Curve<K>, m: usize) -> Poly<K> {
    division_polys(e, m.max(4)).swap_remove(m)
}

/// The `x`-coordinate map of `[n]`, `x − ψ_{n−1}ψ_{n+1}/ψ_n²`, in lowest
/// terms (numerator and `ψ_n²` are coprime on a nonsingular curve).
pub fn mult_by_n_x<K: Field>(e: &Curve<K>, n: usize) -> Result<RatFunc<K>> {
    assert!(n >= 1);
    let psi = division_polys(e, (n + 1).max(4));
    let f4 = e.rhs().scale(&e.proto().from_int_like(4));
    let cross = &psi[n - 1] * &psi[n + 1];
    // ψ_{n±1} carry the 2y factors when n is odd, ψ_n carries (2y)² when n is even
    let (num, den) = if n % 2 == 1 {
        let sq = &psi[n] * &psi[n];
        (&(&Poly::x(e.proto()) * &sq) - &(&f4 * &cross), sq)
    } else {
        let sq = &(&psi[n] * &psi[n]) * &f4;
        (&(&Poly::x(e.proto()) * &sq) - &cross, sq)
    };
    RatFunc::from_coprime_parts(num, den)
}

/// `Ω_n = ψ̃_{2n}/ψ_n⁴` with `[n](x, y) = ([n]_x(x), y·Ω_n(x))`, for odd `n`,
/// as an unreduced numerator/denominator pair.
pub fn mult_by_n_y_factor<K: Field>(e: &Curve<K>, n: usize) -> (Poly<K>, Poly<K>) {
    assert!(n % 2 == 1 && n >= 3);
    let psi = division_polys(e, n + 2);
    let inner = &(&psi[n + 2] * &psi[n - 1].pow(2)) - &(&psi[n - 2] * &psi[n + 1].pow(2));
    (inner, psi[n].pow(3))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{curve_b, el, legendre};
    use super::*;
    use crate::dfield::Elem;
    use crate::ecurve::CurvePoint;

    fn px(c: &[&str], p: u64) -> Poly<Elem> {
        Poly::new(c.iter().map(|s| el(s, p)).collect(), el("0", p))
    }

    #[test]
    fn small_division_polys() {
        let e = legendre(3);
        let psi = division_polys(&e, 5);
        assert!(psi[1].is_one());
        assert!(psi[2].is_one());
        assert_eq!(psi[3], px(&["2*t^2", "0", "0", "2*(1+t)"], 3));
    }

    #[test]
    fn psi_p_degenerates_for_legendre() {
        for p in [3u64, 5, 7] {
            let psi = division_poly(&legendre(p), p as usize);
            assert_eq!(psi.degree(), Some((p * (p - 1) / 2) as usize));
            assert!(psi.detect_p_power_substitution(p as usize).is_some());
        }
    }

    #[test]
    fn multiplication_maps_match_group_law() {
        let e = curve_b();
        let p0 = CurvePoint::Affine(el("0", 5), el("t", 5));
        let q0 = CurvePoint::Affine(el("2", 5), el("t", 5));
        let xs = [p0.clone(), q0.clone(), e.add(&p0, &q0).unwrap()];
        for n in [2usize, 3, 4, 5] {
            let mx = mult_by_n_x(&e, n).unwrap();
            for pt in &xs {
                let np = e.smul(n as i64, pt).unwrap();
                let x = pt.x().unwrap();
                assert_eq!(&mx.eval(x).unwrap(), np.x().unwrap());
                if n % 2 == 1 {
                    let (on, od) = mult_by_n_y_factor(&e, n);
                    let om = on.eval(x).div(&od.eval(x)).unwrap();
                    assert_eq!(pt.y().unwrap().clone() * om, np.y().unwrap().clone());
                }
            }
        }
    }

    #[test]
    fn mult_by_p_is_inseparable() {
        for (e, p) in [(legendre(3), 3usize), (legendre(5), 5), (curve_b(), 5)] {
            assert!(mult_by_n_x(&e, p).unwrap().derivative().is_zero());
        }
    }
}
