//! Jet prolongations of the affine chart `y² = f(x)` up to order 2,
//! canonical lifts of points, and evaluation of δ-expressions on lifts.

use std::collections::BTreeMap;
use std::fmt;

use crate::dfield::{Differential, Elem, Field};
use crate::ecurve::{miller_value, Curve, CurvePoint};
use crate::error::{Error, Result};
use crate::manin::DescentContext;

mod sym;

pub use sym::{var_name, Sym, VarIndex};

pub const MAX_ORDER: usize = 2;
/// Variables `x, y, x′, y′, x″, y″`.
pub const NVARS: usize = 2 * (MAX_ORDER + 1);

type Exps = [u32; NVARS];

/// Polynomial in the jet variables with coefficients in `K`.
#[derive(Clone, PartialEq)]
pub struct MPoly<K: Field> {
    terms: BTreeMap<Exps, K>,
    zero: K,
}

impl<K: Field> MPoly<K> {
    pub fn zero(proto: &K) -> MPoly<K> {
        MPoly {
            terms: BTreeMap::new(),
            zero: proto.zero_like(),
        }
    }

    pub fn constant(c: K) -> MPoly<K> {
        MPoly::term(c, [0; NVARS])
    }

    pub fn var(i: VarIndex, proto: &K) -> MPoly<K> {
        let mut e = [0; NVARS];
        e[i] = 1;
        MPoly::term(proto.one_like(), e)
    }

    fn term(c: K, e: Exps) -> MPoly<K> {
        let mut p = MPoly::zero(&c);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exps, c: K) {
        let sum = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    pub fn scale(&self, c: &K) -> MPoly<K> {
        let mut out = MPoly::zero(&self.zero);
        for (e, a) in &self.terms {
            out.add_term(*e, a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> MPoly<K> {
        let mut acc = MPoly::constant(self.zero.one_like());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Highest derivative order among the variables used.
    pub fn order(&self) -> Option<usize> {
        self.terms
            .keys()
            .flat_map(|e| e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i / 2))
            .max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn map<L: Field>(&self, proto: &L, f: impl Fn(&K) -> Result<L>) -> Result<MPoly<L>> {
        let mut out = MPoly::zero(proto);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Ok(out)
    }

    pub fn eval(&self, values: &[K]) -> Result<K> {
        let mut acc = self.zero.clone();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let v = values.get(i).ok_or(Error::OrderMismatch {
                        used: i / 2,
                        declared: (values.len() / 2).saturating_sub(1),
                    })?;
                    t = t * v.pow(k as u64);
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}

impl<K: Differential> MPoly<K> {
    /// Formal `δ`: coefficients are differentiated and each variable
    /// `v^{(k)}` is sent to `v^{(k+1)}`.
    pub fn formal_derive(&self) -> Result<MPoly<K>> {
        let mut out = MPoly::zero(&self.zero);
        for (e, c) in &self.terms {
            out.add_term(*e, c.derive());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if i + 2 >= NVARS {
                    return Err(Error::OrderTooLarge(i / 2 + 1));
                }
                let mut f = *e;
                f[i] -= 1;
                f[i + 2] += 1;
                out.add_term(f, c.clone() * c.from_int_like(k as i64));
            }
        }
        Ok(out)
    }
}

impl<K: Field> std::ops::Add for &MPoly<K> {
    type Output = MPoly<K>;
    fn add(self, rhs: &MPoly<K>) -> MPoly<K> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<K: Field> std::ops::Sub for &MPoly<K> {
    type Output = MPoly<K>;
    fn sub(self, rhs: &MPoly<K>) -> MPoly<K> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<K: Field> std::ops::Mul for &MPoly<K> {
    type Output = MPoly<K>;
    fn mul(self, rhs: &MPoly<K>) -> MPoly<K> {
        let mut out = MPoly::zero(&self.zero);
        for (e, a) in &self.terms {
            for (f, b) in &rhs.terms {
                let mut g = *e;
                for i in 0..NVARS {
                    g[i] += f[i];
                }
                out.add_term(g, a.clone() * b.clone());
            }
        }
        out
    }
}

impl<K: Field> fmt::Display for MPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mono: Vec<String> = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => mono.push(var_name(i)),
                    _ => mono.push(format!("{}^{k}", var_name(i))),
                }
            }
            let cs = c.to_string();
            let cs = if cs.contains(['+', '-', '/']) {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(match (mono.is_empty(), c.is_one()) {
                (true, _) => cs,
                (false, true) => mono.join("*"),
                (false, false) => format!("{cs}*{}", mono.join("*")),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl<K: Field> fmt::Debug for MPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The chart `y² = f(x)` with its formal derivatives through `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProlongedChart<K: Field> {
    pub order: usize,
    /// Entry `k` is the `k`-fold formal derivative of `y² − f(x)`.
    pub relations: Vec<MPoly<K>>,
}

impl<K: Differential> ProlongedChart<K> {
    /// The order-0 chart of a curve.
    pub fn from_curve(e: &Curve<K>) -> ProlongedChart<K> {
        let proto = e.proto();
        let x = MPoly::var(0, proto);
        let y = MPoly::var(1, proto);
        let f = &(&(&x.pow(3) + &x.pow(2).scale(&e.a2)) + &x.scale(&e.a4)) + &MPoly::constant(e.a6.clone());
        ProlongedChart {
            order: 0,
            relations: vec![&y.pow(2) - &f],
        }
    }

    pub fn equation(&self) -> &MPoly<K> {
        &self.relations[0]
    }

    pub fn map<L: Field>(&self, proto: &L, f: impl Fn(&K) -> Result<L>) -> Result<ProlongedChart<L>> {
        Ok(ProlongedChart {
            order: self.order,
            relations: self.relations.iter().map(|r| r.map(proto, &f)).collect::<Result<_>>()?,
        })
    }

    /// Canonical lift `(x, y, δx, δy, …)` of an affine point, checked
    /// against every relation.
    pub fn canonical_lift(&self, pt: &CurvePoint<K>) -> Result<JetPoint<K>> {
        let CurvePoint::Affine(x, y) = pt else {
            return Err(Error::Unsupported("canonical lift of the point at infinity".into()));
        };
        let mut values = vec![x.clone(), y.clone()];
        for k in 1..=self.order {
            let dx = values[2 * k - 2].derive();
            let dy = values[2 * k - 1].derive();
            values.push(dx);
            values.push(dy);
        }
        for r in &self.relations {
            if !r.eval(&values)?.is_zero() {
                return Err(Error::LiftInconsistent);
            }
        }
        Ok(JetPoint {
            order: self.order,
            values,
        })
    }
}

/// Prolongs a chart to order `n ≤ 2`.
pub fn prolong<K: Differential>(chart: &ProlongedChart<K>, n: usize) -> Result<ProlongedChart<K>> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge(n));
    }
    let mut relations = vec![chart.relations[0].clone()];
    for k in 0..n {
        let next = relations[k].formal_derive()?;
        relations.push(next);
    }
    Ok(ProlongedChart { order: n, relations })
}

/// Canonical lift of `pt` on `e` at order `n`.
pub fn canonical_lift<K: Differential>(e: &Curve<K>, pt: &CurvePoint<K>, n: usize) -> Result<JetPoint<K>> {
    prolong(&ProlongedChart::from_curve(e), n)?.canonical_lift(pt)
}

/// Values of the jet variables at a point of the prolonged chart.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint<K: Field> {
    pub order: usize,
    pub values: Vec<K>,
}

/// A δ-expression in the jet variables with declared order and degree.
#[derive(Clone, Debug)]
pub struct DeltaExpr<K: Field> {
    pub sym: Sym<K>,
    pub order: usize,
    pub degree: u64,
}

impl<K: Field> DeltaExpr<K> {
    /// Fails with `OrderMismatch` when `sym` uses derivatives beyond `order`.
    pub fn new(sym: Sym<K>, order: usize, degree: u64) -> Result<DeltaExpr<K>> {
        if let Some(used) = sym.order().filter(|&u| u > order) {
            return Err(Error::OrderMismatch { used, declared: order });
        }
        Ok(DeltaExpr { sym, order, degree })
    }
}

/// Substitutes the jet point into the expression.
pub fn eval_delta_polynomial<K: Field>(expr: &DeltaExpr<K>, jp: &JetPoint<K>) -> Result<K> {
    if expr.order > jp.order {
        return Err(Error::OrderMismatch {
            used: expr.order,
            declared: jp.order,
        });
    }
    expr.sym.eval(&jp.values)
}

/// `β` as an order-1 expression in the jet coordinates of `Q ∈ E^{(p)}`,
/// through the Miller function at a fixed shift `R`: `δ log f(Q + R) − δ log f(R)`.
pub fn beta_expression(ctx: &DescentContext, r: &CurvePoint<Elem>) -> Result<DeltaExpr<Elem>> {
    let p = ctx.p();
    let proto = ctx.c.zero_like();
    let lift = |a: &Elem| Sym::constant(a.clone());
    let ep: Curve<Sym<Elem>> = ctx.ep.map(lift);
    let s = ctx.s.map(lift);
    let rs = r.map(lift);
    let q = CurvePoint::Affine(Sym::var(0, &proto), Sym::var(1, &proto));
    let fr = miller_value(&ctx.ep, &ctx.s, p, r)?;
    let v = miller_value(&ep, &s, p, &ep.add(&q, &rs)?)?;
    let beta = v.derive().div(&v)? - Sym::constant(fr.log_derivative()?);
    DeltaExpr::new(beta, 1, 1)
}

/// `℘(β(·))`, of order 1 and degree `p`.
pub fn mu_expression(ctx: &DescentContext, r: &CurvePoint<Elem>) -> Result<DeltaExpr<Elem>> {
    let p = ctx.p();
    let beta = beta_expression(ctx, r)?.sym;
    let wp = beta.pow(p) - Sym::constant(ctx.c.pow(p - 1)) * beta;
    DeltaExpr::new(wp, 1, p)
}
