use super::{auxiliary_point, DescentContext, SEARCH_DEGREE};
use crate::dfield::{DiffField, Elem, Field};
use crate::ecurve::{poly_candidates, search_points, Curve, CurvePoint};
use crate::error::{Error, Result};

pub const MIN_TYPE_A: usize = 5;
pub const MIN_TYPE_B: usize = 3;
pub const MIN_PAIRS: usize = 10;
pub const MIN_SHIFTS: usize = 5;

/// Points for the kernel test.
#[derive(Clone, Debug, Default)]
pub struct Samples {
    /// `(R, pR, F(R))`.
    pub type_a: Vec<(CurvePoint<Elem>, CurvePoint<Elem>, CurvePoint<Elem>)>,
    /// `(Q, V(Q))` with `β(Q) ∉ F_p·c`.
    pub type_b: Vec<(CurvePoint<Elem>, CurvePoint<Elem>)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HarnessReport {
    pub type_a: usize,
    pub type_a_zero: usize,
    pub type_b: usize,
    pub type_b_nonzero: usize,
    pub pairs: usize,
    pub pairs_additive: usize,
    pub witness_checks: usize,
    pub witness_independent: usize,
    pub shifts: usize,
    pub shift_independent: bool,
    pub negation_checks: usize,
    pub negation_ok: usize,
    pub failures: Vec<String>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.type_a >= MIN_TYPE_A
            && self.type_b >= MIN_TYPE_B
            && self.pairs >= MIN_PAIRS
            && self.shifts >= MIN_SHIFTS
            && self.shift_independent
            && self.type_a_zero == self.type_a
            && self.type_b_nonzero == self.type_b
            && self.pairs_additive == self.pairs
            && self.witness_independent == self.witness_checks
            && self.negation_ok == self.negation_checks
    }
}

fn small_points(field: &DiffField, curve: &Curve<Elem>) -> Result<Vec<CurvePoint<Elem>>> {
    search_points(field, curve, poly_candidates(field.p(), SEARCH_DEGREE), 8)
}

/// Builds type-(a) and type-(b) samples, extending the working field by
/// an auxiliary quadratic layer when no suitable point of `E^{(p)}` is
/// rational. Returns the context over the final field.
pub fn harness_samples(ctx: &DescentContext) -> Result<(DescentContext, Samples)> {
    let p = ctx.p() as i64;
    let mut q0 = None;
    for q in small_points(&ctx.field, &ctx.ep)? {
        if !q.y().is_some_and(|y| y.is_zero()) && !ctx.on_kernel_line(&ctx.beta(&q)?) {
            q0 = Some(q);
            break;
        }
    }
    let (field, q0) = match q0 {
        Some(q) => (ctx.field.clone(), q),
        None => auxiliary_point(&ctx.field, &ctx.ep, |w, q| {
            let trial = ctx.with_field(w.clone(), vec![q.clone()])?;
            Ok(!trial.on_kernel_line(&trial.beta(q)?))
        })?,
    };
    let ctx = ctx.with_field(field.clone(), vec![q0.clone(), ctx.ep.double(&q0)?])?;

    let found = small_points(&field, &ctx.e)?;
    let torsion: Vec<_> = found
        .iter()
        .filter(|pt| pt.y().is_some_and(|y| y.is_zero()))
        .cloned()
        .collect();
    let mut base: Vec<_> = found
        .into_iter()
        .filter(|pt| !pt.y().is_some_and(|y| y.is_zero()))
        .collect();
    if base.is_empty() {
        base.push(ctx.v.apply(&q0)?);
    }
    let mut rs: Vec<CurvePoint<Elem>> = Vec::new();
    'fill: for k in 1..=MIN_TYPE_A as i64 {
        for b in &base {
            let kb = ctx.e.smul(k, b)?;
            for r in std::iter::once(kb.clone())
                .chain(torsion.iter().map(|t| ctx.e.add(&kb, t)).collect::<Result<Vec<_>>>()?)
            {
                if rs.len() >= MIN_TYPE_A {
                    break 'fill;
                }
                if !r.is_infinity() && !rs.contains(&r) {
                    rs.push(r);
                }
            }
        }
    }

    let mut samples = Samples::default();
    for r in rs {
        let pr = ctx.e.smul(p, &r)?;
        if pr.is_infinity() {
            continue;
        }
        let q = ctx.frobenius_witness(&r);
        samples.type_a.push((r, pr, q));
    }
    let qs = [q0.clone(), ctx.ep.double(&q0)?, ctx.ep.add(&q0, &ctx.s)?];
    for q in qs {
        let v = ctx.v.apply(&q)?;
        samples.type_b.push((q, v));
    }
    Ok((ctx, samples))
}

/// Runs the kernel, additivity, witness, shift and sign checks.
pub fn kernel_harness(ctx: &DescentContext, samples: &Samples) -> Result<HarnessReport> {
    let mut rep = HarnessReport::default();
    let mut witnessed: Vec<(CurvePoint<Elem>, CurvePoint<Elem>, Elem)> = Vec::new();

    for (i, (_, pr, q)) in samples.type_a.iter().enumerate() {
        let mu = ctx.manin_mu(pr, Some(q))?;
        rep.type_a += 1;
        if mu.is_zero() {
            rep.type_a_zero += 1;
        } else {
            rep.failures.push(format!("type (a) sample {i}: μ(pR) = {mu}"));
        }
        witnessed.push((pr.clone(), q.clone(), mu));
    }
    for (i, (q, pt)) in samples.type_b.iter().enumerate() {
        let b = ctx.beta(q)?;
        if ctx.on_kernel_line(&b) {
            rep.failures.push(format!("type (b) sample {i}: β(Q) lies on F_p·c"));
            continue;
        }
        let mu = ctx.manin_mu(pt, Some(q))?;
        rep.type_b += 1;
        if mu.is_zero() {
            rep.failures.push(format!("type (b) sample {i}: μ(V(Q)) = 0"));
        } else {
            rep.type_b_nonzero += 1;
        }
        witnessed.push((pt.clone(), q.clone(), mu));
    }

    'pairs: for i in 0..witnessed.len() {
        for j in i..witnessed.len() {
            if rep.pairs >= MIN_PAIRS {
                break 'pairs;
            }
            let (p1, q1, m1) = &witnessed[i];
            let (p2, q2, m2) = &witnessed[j];
            let sum = ctx.e.add(p1, p2)?;
            let mu = ctx.manin_mu(&sum, Some(&ctx.ep.add(q1, q2)?))?;
            rep.pairs += 1;
            if mu == m1.clone() + m2.clone() {
                rep.pairs_additive += 1;
            } else {
                rep.failures.push(format!("additivity fails on pair ({i}, {j})"));
            }
        }
    }

    for (i, (pt, q, mu)) in witnessed.iter().enumerate() {
        let shifted = ctx.manin_mu(pt, Some(&ctx.ep.add(q, &ctx.s)?))?;
        rep.witness_checks += 1;
        if &shifted == mu {
            rep.witness_independent += 1;
        } else {
            rep.failures.push(format!("witness dependence at sample {i}"));
        }
        let neg = ctx.manin_mu(&ctx.e.neg(pt), Some(&ctx.ep.neg(q)))?;
        rep.negation_checks += 1;
        if neg == -mu.clone() {
            rep.negation_ok += 1;
        } else {
            rep.failures.push(format!("μ(−P) ≠ −μ(P) at sample {i}"));
        }
    }

    if let Some((q, _)) = samples.type_b.first() {
        let mut shifts = ctx.shifts();
        let mut seen: Vec<CurvePoint<Elem>> = Vec::new();
        let mut values = Vec::new();
        for _ in 0..16 * MIN_SHIFTS {
            if values.len() >= MIN_SHIFTS {
                break;
            }
            let r = shifts.next_point()?;
            if seen.contains(&r) {
                continue;
            }
            seen.push(r.clone());
            match ctx.beta_with_shift(q, &r) {
                Ok(b) => values.push(b),
                Err(Error::SupportCollision) => continue,
                Err(e) => return Err(e),
            }
        }
        rep.shifts = values.len();
        rep.shift_independent = values.windows(2).all(|w| w[0] == w[1]);
        if !rep.shift_independent {
            rep.failures.push("β depends on the auxiliary shift".into());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecurve::tests::legendre;

    #[test]
    fn harness_on_curve_c() {
        let ctx = super::super::tests::context_c();
        let (ctx, samples) = harness_samples(&ctx).unwrap();
        let rep = kernel_harness(&ctx, &samples).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn harness_on_legendre_3() {
        let k = DiffField::base(3).unwrap();
        let ctx = DescentContext::new(&k, &legendre(3), 1, 8).unwrap();
        let (ctx, samples) = harness_samples(&ctx).unwrap();
        let rep = kernel_harness(&ctx, &samples).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
