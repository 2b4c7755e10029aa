//! Gauss-Manin connection on `H¹_dR` of `y² = f(x)` over `Q(t)`, the
//! Picard-Fuchs operator of `ω = dx/y`, and the congruences it satisfies
//! modulo `p` with the Hasse-Witt invariant.
//!
//! Classes are written `a·ω + b·η` with `ω = dx/y`, `η = x·dx/y`. Forms
//! `h·dx/y + g·dx/y³` are brought to this basis with the relations
//!
//! ```text
//! f·dx/y³ = dx/y
//! x^j f′·dx/y³ ≡ 2j x^{j−1}·dx/y           (d(x^j/y) ≡ 0)
//! (k x^{k−1} f + ½ x^k f′)·dx/y ≡ 0          (d(x^k y) ≡ 0)
//! ```

use crate::dfield::{reduce_mod_p, Differential, Elem, Expr, Field, Fp, RatFunc, Rational};
use crate::ecurve::Curve;
use crate::error::{Error, Result};
use crate::hassewitt::hasse_invariant;
use crate::upoly::Poly;

/// `Q(t)`.
pub type QT = RatFunc<Rational>;

/// The class `a·ω + b·η`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeRhamClass<K: Field> {
    pub a: K,
    pub b: K,
}

impl<K: Field> DeRhamClass<K> {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn scale(&self, c: &K) -> DeRhamClass<K> {
        DeRhamClass {
            a: self.a.clone() * c.clone(),
            b: self.b.clone() * c.clone(),
        }
    }

    fn add(&self, o: &DeRhamClass<K>) -> DeRhamClass<K> {
        DeRhamClass {
            a: self.a.clone() + o.a.clone(),
            b: self.b.clone() + o.b.clone(),
        }
    }
}

/// `L(y) = y″ + α y′ + β y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PFOperator<K: Field> {
    pub alpha: K,
    pub beta: K,
}

impl PFOperator<QT> {
    pub fn reduce(&self, p: u64) -> Result<PFOperator<RatFunc<Fp>>> {
        Ok(PFOperator {
            alpha: reduce_mod_p(&self.alpha, p)?,
            beta: reduce_mod_p(&self.beta, p)?,
        })
    }
}

/// A one-parameter family `y² = x³ + a₂x² + a₄x + a₆` over `Q(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub curve: Curve<QT>,
}

impl Family {
    pub fn new(a2: QT, a4: QT, a6: QT) -> Result<Family> {
        match Curve::new(a2, a4, a6) {
            Ok(curve) => Ok(Family { curve }),
            Err(Error::Validation(m)) => Err(Error::DegenerateFamily(m)),
            Err(e) => Err(e),
        }
    }

    pub fn from_exprs(a2: &Expr, a4: &Expr, a6: &Expr) -> Result<Family> {
        Family::new(a2.eval_rational()?, a4.eval_rational()?, a6.eval_rational()?)
    }

    /// `y² = x(x−1)(x−t)`.
    pub fn legendre() -> Family {
        let t = QT::var(&Rational::from_integer(0.into()));
        let one = t.one_like();
        Family::new(-(t.clone() + one), t, t_zero()).expect("Legendre family is smooth")
    }

    /// The curve over `F_p(t)`; `BadReduction` if a coefficient is not
    /// `p`-integral or the reduction is singular.
    pub fn reduce(&self, p: u64) -> Result<Curve<RatFunc<Fp>>> {
        let e = &self.curve;
        let r = |a: &QT| reduce_mod_p(a, p);
        match Curve::new(r(&e.a2)?, r(&e.a4)?, r(&e.a6)?) {
            Ok(c) => Ok(c),
            Err(Error::Validation(m)) => Err(Error::BadReduction(m)),
            Err(err) => Err(err),
        }
    }

    /// The reduction as a curve over the tower base field.
    pub fn reduce_tower(&self, p: u64) -> Result<Curve<Elem>> {
        Ok(self.reduce(p)?.map(|a| Elem::from_ratfunc(a.clone())))
    }
}

fn t_zero() -> QT {
    QT::constant(Rational::from_integer(0.into()))
}

fn coefficient_derivative<K: Differential>(f: &Poly<K>) -> Poly<K> {
    f.map(f.proto(), |c| c.derive())
}

/// Rewrites `g·dx/y³` as `h·dx/y`.
fn lower_pole<K: Differential>(e: &Curve<K>, g: &Poly<K>) -> Result<Poly<K>> {
    let f = e.rhs();
    let fp = f.derivative();
    let (one, _, r) = f.gcdex(&fp)?;
    if !one.is_one() {
        return Err(Error::DegenerateFamily("f is not squarefree".into()));
    }
    // g = A f + B f′ with B = g r mod f
    let b = (g * &r).rem(&f)?;
    let a = (g - &(&b * &fp)).div_exact(&f)?;
    let two = e.proto().from_int_like(2);
    Ok(&a + &b.derivative().scale(&two))
}

/// Reduces `h·dx/y` to the basis `ω, η`.
fn lower_degree<K: Differential>(e: &Curve<K>, h: &Poly<K>) -> Result<DeRhamClass<K>> {
    let f = e.rhs();
    let fp = f.derivative();
    let k1 = e.proto().one_like();
    let half = k1.from_int_like(2).inv()?;
    let mut h = h.clone();
    while let Some(d) = h.degree().filter(|&d| d >= 2) {
        let k = d - 2;
        let lead = k1.from_int_like(k as i64) + k1.from_int_like(3) * half.clone();
        if lead.is_zero() {
            return Err(Error::Unsupported(format!(
                "degree reduction of x^{d}·dx/y in characteristic {}",
                k1.characteristic()
            )));
        }
        let mut exact = fp.shift(k).scale(&half);
        if k > 0 {
            exact = &exact + &f.shift(k - 1).scale(&k1.from_int_like(k as i64));
        }
        let c = h.lc().div(&lead)?;
        h = &h - &exact.scale(&c);
    }
    Ok(DeRhamClass {
        a: h.coeff(0),
        b: h.coeff(1),
    })
}

/// The class of `h·dx/y + g·dx/y³` in the basis `ω, η`.
pub fn reduce_form<K: Differential>(e: &Curve<K>, h: &Poly<K>, g: &Poly<K>) -> Result<DeRhamClass<K>> {
    let lowered = lower_pole(e, g)?;
    lower_degree(e, &(h + &lowered))
}

/// `∇_δ` of `a·ω + b·η`.
pub fn gm_derivative<K: Differential>(e: &Curve<K>, c: &DeRhamClass<K>) -> Result<DeRhamClass<K>> {
    let zero = e.proto().zero_like();
    let h = Poly::new(vec![c.a.derive(), c.b.derive()], zero.clone());
    let lin = Poly::new(vec![c.a.clone(), c.b.clone()], zero);
    let minus_half = -e.proto().from_int_like(2).inv()?;
    let g = (&lin * &coefficient_derivative(&e.rhs())).scale(&minus_half);
    reduce_form(e, &h, &g)
}

fn omega<K: Field>(e: &Curve<K>) -> DeRhamClass<K> {
    DeRhamClass {
        a: e.proto().one_like(),
        b: e.proto().zero_like(),
    }
}

/// Solves `∇²ω + α∇ω + βω = 0`.
pub fn picard_fuchs<K: Differential>(e: &Curve<K>) -> Result<PFOperator<K>> {
    let d1 = gm_derivative(e, &omega(e))?;
    if d1.b.is_zero() {
        return Err(Error::IsotrivialFamily);
    }
    let d2 = gm_derivative(e, &d1)?;
    let alpha = -d2.b.div(&d1.b)?;
    let beta = -(d2.a + alpha.clone() * d1.a);
    Ok(PFOperator { alpha, beta })
}

/// `∇²ω + α∇ω + βω`, zero when the operator is correct.
pub fn closure_residual<K: Differential>(e: &Curve<K>, op: &PFOperator<K>) -> Result<DeRhamClass<K>> {
    let w = omega(e);
    let d1 = gm_derivative(e, &w)?;
    let d2 = gm_derivative(e, &d1)?;
    Ok(d2.add(&d1.scale(&op.alpha)).add(&w.scale(&op.beta)))
}

/// `1` when `∇ω` has a nonzero `η`-component, over any differential field.
pub fn delta_rank<K: Differential>(e: &Curve<K>) -> Result<u8> {
    Ok(u8::from(!gm_derivative(e, &omega(e))?.b.is_zero()))
}

/// `1` when the `η`-component of `∇ω` survives reduction mod `p`, else `0`.
pub fn kodaira_spencer_rank(family: &Family, p: u64) -> Result<u8> {
    family.reduce(p)?;
    let d1 = gm_derivative(&family.curve, &omega(&family.curve))?;
    Ok(u8::from(!reduce_mod_p(&d1.b, p)?.is_zero()))
}

/// `L(y) = y″ + αy′ + βy`.
pub fn direct_apply<K: Differential>(op: &PFOperator<K>, y: &K) -> K {
    let d = y.derive();
    d.derive() + op.alpha.clone() * d + op.beta.clone() * y.clone()
}

/// `L*(z) = z″ − αz′ + (β − α′)z`.
pub fn adjoint_apply<K: Differential>(op: &PFOperator<K>, z: &K) -> K {
    let d = z.derive();
    d.derive() - op.alpha.clone() * d + (op.beta.clone() - op.alpha.derive()) * z.clone()
}

/// A rational `w` with `w′ = ᾱw`, from the partial fractions of `ᾱ`:
/// every pole must be simple with residue in `F_p`, then `w = Π D_r^r`
/// where `D_r` collects the poles of residue `r`.
pub fn transport_factor(op: &PFOperator<RatFunc<Fp>>) -> Result<RatFunc<Fp>> {
    let alpha = &op.alpha;
    let p = alpha.proto().modulus();
    if alpha.is_zero() {
        return Ok(alpha.one_like());
    }
    let (n, d) = (alpha.numer(), alpha.denom());
    if n.degree() >= d.degree() {
        return Err(Error::NoRationalTransport("polynomial part".into()));
    }
    let dd = d.derivative();
    if !d.gcd(&dd)?.is_one() {
        return Err(Error::NoRationalTransport("pole of order ≥ 2".into()));
    }
    let mut w = Poly::one(alpha.proto());
    let mut covered = 0;
    for r in 1..p {
        let dr = d.gcd(&(n - &dd.scale(&Fp::from_u64(r, p))))?;
        covered += dr.degree().unwrap_or(0);
        w = &w * &dr.pow(r);
    }
    if covered != d.degree().unwrap_or(0) {
        return Err(Error::NoRationalTransport("residue outside F_p".into()));
    }
    let w = RatFunc::from_poly(w);
    if w.derive() != alpha.clone() * w.clone() {
        return Err(Error::NoRationalTransport("integrating factor check failed".into()));
    }
    Ok(w)
}

/// `(L(λ) = 0, L*(wλ) = 0)`.
pub fn congruence_flags(op: &PFOperator<RatFunc<Fp>>, w: &RatFunc<Fp>, lambda: &RatFunc<Fp>) -> (bool, bool) {
    let direct = direct_apply(op, lambda).is_zero();
    let dual = adjoint_apply(op, &(w.clone() * lambda.clone())).is_zero();
    (direct, dual)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImkReport {
    pub p: u64,
    pub lambda_bar: RatFunc<Fp>,
    pub alpha: RatFunc<Fp>,
    pub beta: RatFunc<Fp>,
    pub w: RatFunc<Fp>,
    pub direct_ok: bool,
    pub dual_ok: bool,
}

/// Checks `L(λ̄) = 0` and `L*(wλ̄) = 0` modulo `p`.
pub fn imk_check(family: &Family, p: u64) -> Result<ImkReport> {
    let reduced = family.reduce(p)?;
    let op = picard_fuchs(&family.curve)?.reduce(p)?;
    let hw = hasse_invariant(&reduced);
    if !hw.ordinary {
        return Err(Error::NotOrdinary);
    }
    let w = transport_factor(&op)?;
    let (direct_ok, dual_ok) = congruence_flags(&op, &w, &hw.lambda_bar);
    Ok(ImkReport {
        p,
        lambda_bar: hw.lambda_bar,
        alpha: op.alpha,
        beta: op.beta,
        w,
        direct_ok,
        dual_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfield::parse_expr;
    use proptest::prelude::*;

    fn q(s: &str) -> QT {
        parse_expr(s).unwrap().eval_rational().unwrap()
    }

    fn fp(s: &str, p: u64) -> RatFunc<Fp> {
        reduce_mod_p(&q(s), p).unwrap()
    }

    fn qpoly(cs: &[&str]) -> Poly<QT> {
        Poly::new(cs.iter().map(|s| q(s)).collect(), t_zero())
    }

    #[test]
    fn exact_and_trivial_forms() {
        let e = Family::legendre().curve;
        // d(x/y) = dx/y − ½ x f′ dx/y³
        let g = (&Poly::x(&t_zero()) * &e.rhs().derivative()).scale(&q("-1/2"));
        assert!(reduce_form(&e, &Poly::one(&t_zero()), &g).unwrap().is_zero());
        let r = reduce_form(&e, &Poly::zero(&t_zero()), &e.rhs()).unwrap();
        assert_eq!(r, DeRhamClass { a: q("1"), b: q("0") });
        // d(x y) ≡ 0
        let exact = &e.rhs() + &(&Poly::x(&t_zero()) * &e.rhs().derivative()).scale(&q("1/2"));
        assert!(reduce_form(&e, &exact, &Poly::zero(&t_zero())).unwrap().is_zero());
        // d(x² y) ≡ 0
        let exact2 = &(&Poly::x(&t_zero()) * &e.rhs()).scale(&q("2"))
            + &(&Poly::monomial(q("1"), 2) * &e.rhs().derivative()).scale(&q("1/2"));
        assert!(reduce_form(&e, &exact2, &qpoly(&[])).unwrap().is_zero());
        assert!(reduce_form(&e, &qpoly(&["0", "0", "0", "0", "t"]), &qpoly(&[])).is_ok());
    }

    #[test]
    fn legendre_operator() {
        let e = Family::legendre().curve;
        let op = picard_fuchs(&e).unwrap();
        assert_eq!(op.alpha, q("(1-2*t)/(t*(1-t))"));
        assert_eq!(op.beta, q("-1/(4*t*(1-t))"));
        assert!(closure_residual(&e, &op).unwrap().is_zero());
        for p in [3u64, 5, 7, 11, 13] {
            assert!(op.reduce(p).is_ok());
        }
    }

    #[test]
    fn other_families_close() {
        for (a2, a4, a6) in [("0", "1", "t^2"), ("t", "1", "t^3+1"), ("0", "t", "t")] {
            let fam = Family::from_exprs(
                &parse_expr(a2).unwrap(),
                &parse_expr(a4).unwrap(),
                &parse_expr(a6).unwrap(),
            )
            .unwrap();
            let op = picard_fuchs(&fam.curve).unwrap();
            assert!(closure_residual(&fam.curve, &op).unwrap().is_zero(), "{a2} {a4} {a6}");
        }
    }

    #[test]
    fn isotrivial_and_degenerate() {
        let fam = Family::new(q("0"), q("2"), q("1")).unwrap();
        assert_eq!(picard_fuchs(&fam.curve), Err(Error::IsotrivialFamily));
        assert_eq!(kodaira_spencer_rank(&fam, 5), Ok(0));
        assert_eq!(kodaira_spencer_rank(&Family::legendre(), 3), Ok(1));
        assert_eq!(delta_rank(&Family::legendre().reduce(3).unwrap()), Ok(1));
        assert_eq!(delta_rank(&fam.reduce(5).unwrap()), Ok(0));
        assert!(matches!(
            Family::new(q("0"), q("0"), q("0")),
            Err(Error::DegenerateFamily(_))
        ));
        let bad = Family::new(q("0"), q("t/3"), q("1")).unwrap();
        assert!(matches!(bad.reduce(3), Err(Error::BadReduction(_))));
        assert!(matches!(kodaira_spencer_rank(&bad, 3), Err(Error::BadReduction(_))));
    }

    #[test]
    fn adjoint_examples() {
        let op = picard_fuchs(&Family::legendre().curve).unwrap();
        let op3 = op.reduce(3).unwrap();
        assert!(adjoint_apply(&op3, &fp("(1+t)*t*(1-t)", 3)).is_zero());
        assert!(adjoint_apply(&op3, &fp("0", 3)).is_zero());
        let op5 = op.reduce(5).unwrap();
        assert!(adjoint_apply(&op5, &fp("(1+4*t+t^2)*t*(1-t)", 5)).is_zero());
        assert!(direct_apply(&op5, &fp("1+4*t+t^2", 5)).is_zero());
        assert!(direct_apply(&op3, &fp("1+t", 3)).is_zero());
    }

    #[test]
    fn transport_examples() {
        let op3 = picard_fuchs(&Family::legendre().curve).unwrap().reduce(3).unwrap();
        let w = transport_factor(&op3).unwrap();
        assert_eq!(w, fp("t*(t-1)", 3));
        let zero = PFOperator {
            alpha: fp("0", 5),
            beta: fp("0", 5),
        };
        assert_eq!(transport_factor(&zero).unwrap(), fp("1", 5));
        let half = PFOperator {
            alpha: fp("1/(2*t)", 5),
            beta: fp("0", 5),
        };
        assert_eq!(transport_factor(&half).unwrap(), fp("t^3", 5));
        let double = PFOperator {
            alpha: fp("1/t^2", 5),
            beta: fp("0", 5),
        };
        assert!(matches!(transport_factor(&double), Err(Error::NoRationalTransport(_))));
        let poly = PFOperator {
            alpha: fp("t", 5),
            beta: fp("0", 5),
        };
        assert!(matches!(transport_factor(&poly), Err(Error::NoRationalTransport(_))));
    }

    #[test]
    fn legendre_sweep() {
        let fam = Family::legendre();
        for p in [3u64, 5, 7, 11, 13] {
            let r = imk_check(&fam, p).unwrap();
            assert!(r.direct_ok && r.dual_ok, "p = {p}");
        }
        let ss = Family::new(q("0"), q("1"), q("0")).unwrap();
        assert_eq!(imk_check(&ss, 3).unwrap_err(), Error::IsotrivialFamily);
    }

    fn rand_poly(p: u64, cs: &[u64]) -> RatFunc<Fp> {
        RatFunc::from_poly(Poly::new(
            cs.iter().map(|&c| Fp::from_u64(c, p)).collect(),
            Fp::new(0, p),
        ))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn pth_power_invariance(i in 0usize..5, cs in prop::collection::vec(0u64..13, 1..4), ds in prop::collection::vec(0u64..13, 1..3)) {
            let p = [3u64, 5, 7, 11, 13][i];
            let r = imk_check(&Family::legendre(), p).unwrap();
            let num = rand_poly(p, &cs);
            let den = rand_poly(p, &ds);
            prop_assume!(!num.is_zero() && !den.is_zero());
            let h = num.div(&den).unwrap().pow(p);
            let op = PFOperator { alpha: r.alpha.clone(), beta: r.beta.clone() };
            let flags = congruence_flags(&op, &r.w, &(r.lambda_bar.clone() * h));
            prop_assert_eq!(flags, (true, true));
        }

        #[test]
        fn adjoint_is_linear(cs in prop::collection::vec(0u64..5, 0..5), ds in prop::collection::vec(0u64..5, 0..5)) {
            let op = picard_fuchs(&Family::legendre().curve).unwrap().reduce(5).unwrap();
            let (a, b) = (rand_poly(5, &cs), rand_poly(5, &ds));
            prop_assert_eq!(
                adjoint_apply(&op, &(a.clone() + b.clone())),
                adjoint_apply(&op, &a) + adjoint_apply(&op, &b)
            );
        }
    }
}
