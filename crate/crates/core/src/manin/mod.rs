//! The Manin map in characteristic `p`: the descent map `β` for the
//! Frobenius, the additive polynomial `℘`, and `μ(P) = ℘(β(Q))` for any
//! `Q` with `V(Q) = P`.

use crate::dfield::{DiffField, Differential, Elem, Field, RatFunc};
use crate::ecurve::{
    miller_eval, miller_eval_with, miller_value, poly_candidates, search_points, Curve, CurvePoint, Isogeny,
    ShiftSource, MILLER_RETRIES,
};
use crate::error::{Error, Result};
use crate::hassewitt::{hasse_invariant, kernel_point};
use crate::pfgm::delta_rank;
use crate::upoly::{rational_roots, Poly};

mod harness;

pub use harness::{harness_samples, kernel_harness, HarnessReport, Samples};

/// Maximal `t`-degree of the `x`-coordinates tried when looking for points.
const SEARCH_DEGREE: usize = 2;
const POOL_SIZE: usize = 4;

#[derive(Clone, Debug)]
pub struct DescentContext {
    /// Working field, containing the coordinates of `S`.
    pub field: DiffField,
    pub e: Curve<Elem>,
    pub ep: Curve<Elem>,
    pub v: Isogeny,
    /// Nonzero point of `ker V` on `E^{(p)}`.
    pub s: CurvePoint<Elem>,
    /// `β(S)`.
    pub c: Elem,
    pub seed: u64,
    pub deg_bound: usize,
    pool: Vec<CurvePoint<Elem>>,
    /// A shift `R₀` with `δ log f_{p,S}(R₀)`.
    base_shift: Option<(CurvePoint<Elem>, Elem)>,
}

impl DescentContext {
    /// Fails with `NotOrdinary`, `DeltaRankZero`, `NoRationalKernel` or
    /// `DegenerateDescent`.
    pub fn new(field: &DiffField, e: &Curve<Elem>, seed: u64, deg_bound: usize) -> Result<DescentContext> {
        if !hasse_invariant(e).ordinary {
            return Err(Error::NotOrdinary);
        }
        if delta_rank(e)? == 0 {
            return Err(Error::DeltaRankZero);
        }
        let kd = kernel_point(field, e, deg_bound)?;
        let mut ctx = DescentContext {
            field: kd.field,
            e: e.clone(),
            ep: e.frobenius_twist(),
            v: kd.v,
            s: kd.s,
            c: Elem::zero(e.characteristic()),
            seed,
            deg_bound,
            pool: Vec::new(),
            base_shift: None,
        };
        ctx.rebuild_pool(Vec::new())?;
        ctx.c = ctx.beta(&ctx.s.clone())?;
        if ctx.c.is_zero() {
            return Err(Error::DegenerateDescent);
        }
        Ok(ctx)
    }

    /// The cached shift `R₀`.
    pub fn base_shift(&self) -> Option<&CurvePoint<Elem>> {
        self.base_shift.as_ref().map(|(r, _)| r)
    }

    pub fn p(&self) -> u64 {
        self.e.characteristic()
    }

    /// Same context over a larger working field; `extra` points of
    /// `E^{(p)}` join the shift pool.
    pub fn with_field(&self, field: DiffField, extra: Vec<CurvePoint<Elem>>) -> Result<DescentContext> {
        let mut ctx = self.clone();
        ctx.field = field;
        ctx.rebuild_pool(extra)?;
        Ok(ctx)
    }

    /// Points of `E^{(p)}` used as Miller shifts: Frobenius images of
    /// small points of `E`, small points of `E^{(p)}`, `extra` and `S`.
    /// When all of them have small order, a point over an auxiliary
    /// quadratic extension is added.
    fn rebuild_pool(&mut self, extra: Vec<CurvePoint<Elem>>) -> Result<()> {
        let cands = poly_candidates(self.p(), SEARCH_DEGREE);
        let mut pts: Vec<CurvePoint<Elem>> = search_points(&self.field, &self.e, cands.clone(), POOL_SIZE)?
            .iter()
            .map(|pt| self.e.point_frobenius(pt))
            .collect();
        pts.extend(search_points(&self.field, &self.ep, cands, POOL_SIZE)?);
        pts.extend(extra);
        pts.push(self.s.clone());
        let mut pool: Vec<CurvePoint<Elem>> = Vec::new();
        for pt in pts {
            if !pt.is_infinity() && !pool.contains(&pt) {
                pool.push(pt);
            }
        }
        if !pool.iter().any(|pt| has_large_order(&self.ep, pt)) {
            let (_, r) = auxiliary_point(&self.field, &self.ep, |_, _| Ok(true))?;
            pool.push(self.ep.double(&r)?);
            pool.push(r);
        }
        self.pool = pool;
        self.base_shift = None;
        let mut shifts = self.shifts();
        for _ in 0..MILLER_RETRIES {
            let r = shifts.next_point()?;
            match miller_value(&self.ep, &self.s, self.p(), &r) {
                Ok(v) => {
                    self.base_shift = Some((r, v.log_derivative()?));
                    break;
                }
                Err(Error::SupportCollision) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    pub fn pool(&self) -> &[CurvePoint<Elem>] {
        &self.pool
    }

    /// Fresh shift stream; every call starts from the context seed.
    pub fn shifts(&self) -> ShiftSource<Elem> {
        ShiftSource::new(self.ep.clone(), self.pool.clone(), self.seed)
    }

    /// `β(Q) = δv/v` with `v = f_{p,S}(Q + R)/f_{p,S}(R)`.
    pub fn beta(&self, q: &CurvePoint<Elem>) -> Result<Elem> {
        if q.is_infinity() {
            return Ok(self.c.zero_like());
        }
        if let Some((r, dlog_r)) = &self.base_shift {
            match miller_value(&self.ep, &self.s, self.p(), &self.ep.add(q, r)?) {
                Ok(v) => return Ok(v.log_derivative()? - dlog_r.clone()),
                Err(Error::SupportCollision) => {}
                Err(e) => return Err(e),
            }
        }
        let (v, _) = miller_eval(&self.ep, &self.s, self.p(), q, &mut self.shifts())?;
        v.log_derivative()
    }

    /// `β(Q)` computed with one fixed shift `R`.
    pub fn beta_with_shift(&self, q: &CurvePoint<Elem>, r: &CurvePoint<Elem>) -> Result<Elem> {
        miller_eval_with(&self.ep, &self.s, self.p(), q, r)?.log_derivative()
    }

    /// `℘(z) = z^p − c^{p−1} z`.
    pub fn wp(&self, z: &Elem) -> Elem {
        let p = self.p();
        z.pow(p) - self.c.pow(p - 1) * z.clone()
    }

    /// `F(R)`, a preimage of `pR` under `V`.
    pub fn frobenius_witness(&self, r: &CurvePoint<Elem>) -> CurvePoint<Elem> {
        self.e.point_frobenius(r)
    }

    /// A point `Q` of `E^{(p)}` with `V(Q) = P` whose `x`-coordinate is a
    /// rational root of `V_x(X) = x_P` within the degree bound.
    pub fn fibre_witness(&self, pt: &CurvePoint<Elem>) -> Result<CurvePoint<Elem>> {
        let CurvePoint::Affine(x, y) = pt else {
            return Ok(CurvePoint::Infinity);
        };
        let fibre = self.v.u.numer() - &self.v.u.denom().scale(x);
        let base: Option<Vec<RatFunc<_>>> = fibre.coeffs().iter().map(|c| c.as_base().cloned()).collect();
        let Some(base) = base else {
            return Err(Error::NoWitness);
        };
        let zero = RatFunc::constant(crate::dfield::Fp::new(0, self.p()));
        for root in rational_roots(&Poly::new(base, zero), self.deg_bound)? {
            let xq = Elem::from_ratfunc(root);
            let Some(wx) = self.v.w.eval(&xq) else { continue };
            if wx.is_zero() {
                continue;
            }
            let q = CurvePoint::Affine(xq, y.div(&wx)?);
            if self.ep.is_on(&q) && &self.v.apply(&q)? == pt {
                return Ok(q);
            }
        }
        Err(Error::NoWitness)
    }

    /// `μ(P) = ℘(β(Q))` for a witness `Q` with `V(Q) = P`, searched in
    /// the `V`-fibre when none is given.
    pub fn manin_mu(&self, pt: &CurvePoint<Elem>, witness: Option<&CurvePoint<Elem>>) -> Result<Elem> {
        if pt.is_infinity() {
            return Ok(self.c.zero_like());
        }
        let q = match witness {
            Some(q) => {
                if &self.v.apply(q)? != pt {
                    return Err(Error::StructureViolation("witness is not in the V-fibre".into()));
                }
                q.clone()
            }
            None => self.fibre_witness(pt)?,
        };
        Ok(self.wp(&self.beta(&q)?))
    }

    /// Whether `z ∈ F_p·c`.
    pub fn on_kernel_line(&self, z: &Elem) -> bool {
        (0..self.p() as i64).any(|j| (z.clone() - self.c.from_int_like(j) * self.c.clone()).is_zero())
    }
}

const SMALL_ORDER: i64 = 12;

fn has_large_order(e: &Curve<Elem>, pt: &CurvePoint<Elem>) -> bool {
    let mut acc = pt.clone();
    for _ in 1..SMALL_ORDER {
        if acc.is_infinity() {
            return false;
        }
        match e.add(&acc, pt) {
            Ok(next) => acc = next,
            Err(_) => return false,
        }
    }
    !acc.is_infinity()
}

/// First non-constant candidate `x` giving a point of large order that
/// `accept` takes, adjoining `√f(x)` to `field` if needed.
pub(crate) fn auxiliary_point(
    field: &DiffField,
    curve: &Curve<Elem>,
    mut accept: impl FnMut(&DiffField, &CurvePoint<Elem>) -> Result<bool>,
) -> Result<(DiffField, CurvePoint<Elem>)> {
    for x in poly_candidates(field.p(), SEARCH_DEGREE) {
        let fx = curve.eval_rhs(&x);
        if x.is_delta_constant() || fx.is_zero() {
            continue;
        }
        let (w, y) = field.with_sqrt(&fx)?;
        let pt = CurvePoint::Affine(x, y);
        if has_large_order(curve, &pt) && accept(&w, &pt)? {
            return Ok((w, pt));
        }
    }
    Err(Error::Unsupported("no auxiliary point".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecurve::tests::{curve, curve_b, el, legendre};

    pub(crate) fn context_c() -> DescentContext {
        let k = DiffField::base(3).unwrap();
        DescentContext::new(&k, &curve("1", "t", "0", 3), 0, 8).unwrap()
    }

    #[test]
    fn gates() {
        let k3 = DiffField::base(3).unwrap();
        assert_eq!(
            DescentContext::new(&k3, &curve("0", "1", "0", 3), 0, 8).unwrap_err(),
            Error::NotOrdinary
        );
        let k5 = DiffField::base(5).unwrap();
        // constant ordinary curve over F_5: δ-rank zero
        assert_eq!(
            DescentContext::new(&k5, &curve("0", "1", "1", 5), 0, 8).unwrap_err(),
            Error::DeltaRankZero
        );
    }

    #[test]
    fn kernel_line_and_wp() {
        let ctx = context_c();
        assert_eq!(ctx.s.x().unwrap(), &el("t^2", 3));
        assert!(!ctx.c.is_zero());
        assert!(ctx.wp(&ctx.c.zero_like()).is_zero());
        for j in 0..3 {
            assert!(ctx.wp(&(ctx.c.from_int_like(j) * ctx.c.clone())).is_zero());
        }
        let (a, b) = (el("t", 3), el("1/(1+t^2)", 3));
        assert_eq!(ctx.wp(&(a.clone() + b.clone())), ctx.wp(&a) + ctx.wp(&b));
        assert!(ctx.on_kernel_line(&(ctx.c.clone() * el("2", 3))));
        assert!(!ctx.on_kernel_line(&(ctx.c.clone() * el("t", 3))));
    }

    #[test]
    fn beta_kills_frobenius_images() {
        let ctx = context_c();
        let pts = search_points(&ctx.field, &ctx.e, poly_candidates(3, 2), 6).unwrap();
        assert!(!pts.is_empty());
        for pt in pts {
            assert!(ctx.beta(&ctx.frobenius_witness(&pt)).unwrap().is_zero());
        }
    }

    #[test]
    fn no_rational_point_of_order_p() {
        // the x-coordinate of the étale p-torsion of E is x_S^{1/p}, never rational
        for (e, p) in [(legendre(3), 3u64), (curve("1", "t", "0", 3), 3), (curve_b(), 5)] {
            let g = crate::hassewitt::etale_kernel_poly(&e).unwrap();
            let base: Vec<_> = g.coeffs().iter().map(|c| c.as_base().unwrap().clone()).collect();
            let zero = RatFunc::constant(crate::dfield::Fp::new(0, p));
            for r in rational_roots(&Poly::new(base, zero), 8).unwrap() {
                assert_eq!(r.pth_root(), Err(Error::NotAPthPower));
            }
        }
    }

    #[test]
    fn mu_of_infinity_and_fibre_witness() {
        let k = DiffField::base(5).unwrap();
        let ctx = DescentContext::new(&k, &curve_b(), 0, 8).unwrap();
        assert!(ctx.manin_mu(&CurvePoint::Infinity, None).unwrap().is_zero());
        let r = CurvePoint::Affine(el("2", 5), el("t", 5));
        let pr = ctx.e.smul(5, &r).unwrap();
        assert!(ctx.manin_mu(&pr, None).unwrap().is_zero());
        let q = ctx.fibre_witness(&pr).unwrap();
        assert_eq!(ctx.v.apply(&q).unwrap(), pr);
    }
}
