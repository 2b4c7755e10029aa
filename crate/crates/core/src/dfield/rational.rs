use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Field, Fp, RatFunc};
use crate::error::{Error, Result};
use crate::upoly::Poly;

/// Exact rationals, the coefficient field on the characteristic-zero side.
pub type Rational = BigRational;

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }

    fn one_like(&self) -> Self {
        BigRational::one()
    }

    fn from_int_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.recip())
    }

    fn characteristic(&self) -> u64 {
        0
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn bigint_mod(n: &BigInt, p: u64) -> Fp {
    let m = BigInt::from(p);
    let r = n.mod_floor(&m);
    Fp::from_u64(r.to_u64().expect("residue fits in u64"), p)
}

/// Reduces a rational function over `Q` modulo `p`.
///
/// The element is first rescaled to a primitive integral pair
/// `numerator / denominator` in `Z[t]`; it lies in the local ring at `p`
/// exactly when `p` does not divide that denominator.
pub fn reduce_mod_p(a: &RatFunc<Rational>, p: u64) -> Result<RatFunc<Fp>> {
    super::check_odd_prime(p)?;
    let mut lcm = BigInt::one();
    for c in a.numer().coeffs().iter().chain(a.denom().coeffs()) {
        lcm = lcm.lcm(c.denom());
    }
    let mut content = BigInt::zero();
    let scale = |c: &Rational| (c * BigRational::from_integer(lcm.clone())).to_integer();
    for c in a.numer().coeffs().iter().chain(a.denom().coeffs()) {
        content = content.gcd(&scale(c));
    }
    if content.is_zero() {
        content = BigInt::one();
    }
    let content = content.abs();
    let zero = Fp::new(0, p);
    let reduce = |poly: &Poly<Rational>| -> Poly<Fp> {
        Poly::new(
            poly.coeffs()
                .iter()
                .map(|c| bigint_mod(&(scale(c) / &content), p))
                .collect(),
            zero,
        )
    };
    let num = reduce(a.numer());
    let den = reduce(a.denom());
    if den.is_zero() {
        return Err(Error::BadReduction(format!("{} is not integral at p={}", a, p)));
    }
    RatFunc::from_parts(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfield::parse_expr;

    fn q(s: &str) -> RatFunc<Rational> {
        parse_expr(s).unwrap().eval_rational().unwrap()
    }

    fn fp(s: &str, p: u64) -> RatFunc<Fp> {
        reduce_mod_p(&q(s), p).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_mod_p(&q("(1-2*t)/(t-t^2)"), 3).unwrap(), fp("(1+t)/(t-t^2)", 3));
        assert_eq!(reduce_mod_p(&q("-1/(4*(t-t^2))"), 3).unwrap(), fp("2/(t-t^2)", 3));
        assert!(matches!(reduce_mod_p(&q("1/3"), 3), Err(Error::BadReduction(_))));
    }

    #[test]
    fn reduction_accepts_non_monic_local_units() {
        // 1/(1+3t) is a unit of the local ring even though its monic form has 3 in denominators
        assert_eq!(reduce_mod_p(&q("1/(1+3*t)"), 3).unwrap(), fp("1", 3));
    }
}
