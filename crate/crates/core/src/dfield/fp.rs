use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Field, SqrtField};
use crate::error::{Error, Result};

/// Residue class modulo an odd prime `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    pub fn new(value: i64, p: u64) -> Fp {
        let m = p as i64;
        Fp {
            value: value.rem_euclid(m) as u64,
            p,
        }
    }

    pub fn from_u64(value: u64, p: u64) -> Fp {
        Fp { value: value % p, p }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Representative in `(-p/2, p/2]`, convenient for printing.
    pub fn signed(&self) -> i64 {
        if self.value > self.p / 2 {
            self.value as i64 - self.p as i64
        } else {
            self.value as i64
        }
    }

    pub fn is_quadratic_residue(&self) -> bool {
        self.value == 0 || self.pow((self.p - 1) / 2).value == 1
    }

    fn checked(&self, other: &Fp) {
        debug_assert_eq!(self.p, other.p, "mixing prime fields");
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.checked(&rhs);
        let s = self.value + rhs.value;
        Fp {
            value: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.checked(&rhs);
        Fp {
            value: if self.value >= rhs.value {
                self.value - rhs.value
            } else {
                self.value + self.p - rhs.value
            },
            p: self.p,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.checked(&rhs);
        Fp {
            value: ((self.value as u128 * rhs.value as u128) % self.p as u128) as u64,
            p: self.p,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: if self.value == 0 { 0 } else { self.p - self.value },
            p: self.p,
        }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Fp {
        Fp { value: 0, p: self.p }
    }

    fn one_like(&self) -> Fp {
        Fp { value: 1, p: self.p }
    }

    fn from_int_like(&self, n: i64) -> Fp {
        Fp::new(n, self.p)
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn inv(&self) -> Result<Fp> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.p - 2))
    }

    fn characteristic(&self) -> u64 {
        self.p
    }
}

impl SqrtField for Fp {
    /// Tonelli-Shanks.
    fn sqrt(&self) -> Result<Option<Fp>> {
        if self.value == 0 {
            return Ok(Some(*self));
        }
        if !self.is_quadratic_residue() {
            return Ok(None);
        }
        let p = self.p;
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = Fp::from_u64(2, p);
        while z.is_quadratic_residue() {
            z = z + z.one_like();
        }
        let mut m = s;
        let mut c = z.pow(q);
        let mut t = self.pow(q);
        let mut r = self.pow(q.div_ceil(2));
        while t.value != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt.value != 1 {
                tt = tt * tt;
                i += 1;
            }
            let b = c.pow(1u64 << (m - i - 1));
            m = i;
            c = b * b;
            t = t * c;
            r = r * b;
        }
        Ok(Some(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_negation() {
        let a = Fp::new(2, 3);
        assert_eq!(a.inv().unwrap(), Fp::new(2, 3));
        assert_eq!(-a, Fp::new(1, 3));
        assert_eq!(Fp::new(-7, 5), Fp::new(3, 5));
        assert!(Fp::new(0, 5).inv().is_err());
    }

    #[test]
    fn square_roots_mod_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 17] {
            for v in 0..p {
                let a = Fp::from_u64(v, p);
                match a.sqrt().unwrap() {
                    Some(r) => assert_eq!(r * r, a),
                    None => assert!((0..p).all(|w| (w * w) % p != v)),
                }
            }
        }
    }
}
