//! Exact coefficient fields: prime fields, the rationals, rational function
//! fields in `t` with the derivation `d/dt`, and towers of simple separable
//! extensions over `F_p(t)`.
//!
//! Elements carry whatever context they need (the prime, the extension
//! layer), so a zero or one of the right kind is always obtained from an
//! existing element through [`Field::zero_like`] and [`Field::one_like`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub mod expr;
pub mod fp;
pub mod ratfunc;
pub mod rational;
pub mod tower;

pub use expr::{parse_expr, Expr};
pub use fp::Fp;
pub use ratfunc::RatFunc;
pub use rational::{reduce_mod_p, Rational};
pub use tower::{DiffField, Elem, Layer};

/// A commutative field with exact arithmetic.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    #[allow(clippy::wrong_self_convention)]
    fn from_int_like(&self, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Result<Self>;
    /// Characteristic of the field, `0` for fields of characteristic zero.
    fn characteristic(&self) -> u64;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.inv()?)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Integer power, negative exponents invert.
    fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            self.inv().map(|x| x.pow(e.unsigned_abs()))
        }
    }
}

/// A field equipped with a derivation `δ`.
pub trait Differential: Field {
    fn derive(&self) -> Self;

    /// `δa = 0`; in characteristic `p` this is exactly membership in the
    /// subfield of `p`-th powers.
    fn is_delta_constant(&self) -> bool {
        self.derive().is_zero()
    }

    /// Logarithmic derivative `δa / a`.
    fn log_derivative(&self) -> Result<Self> {
        self.derive().div(self)
    }
}

/// Fields with a square-root oracle.
pub trait SqrtField: Field {
    /// `Some(b)` with `b² = a`, or `None` when `a` is not a square in the
    /// field the element lives in.
    fn sqrt(&self) -> Result<Option<Self>>;
}

/// Checks that `p` is an odd prime.
pub fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::InvalidCharacteristic(p));
    }
    Ok(())
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
