use std::fmt;

use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Element of the prime field F_p.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
    v: u64,
}

impl Fp {
    pub fn new(p: u64, v: i64) -> Self {
        let m = v.rem_euclid(p as i64) as u64;
        Fp { p, v: m }
    }

    pub fn zero(p: u64) -> Self {
        Fp { p, v: 0 }
    }

    pub fn one(p: u64) -> Self {
        Fp { p, v: 1 % p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    /// All elements of F_p in increasing order.
    pub fn all(p: u64) -> impl Iterator<Item = Fp> {
        (0..p).map(move |v| Fp { p, v })
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Scalar for Fp {
    fn zero_like(&self) -> Self {
        Fp::zero(self.p)
    }
    fn one_like(&self) -> Self {
        Fp::one(self.p)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fp::new(self.p, n)
    }
    fn vanishes(&self) -> bool {
        self.v == 0
    }
    fn plus(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        Fp { p: self.p, v: ((self.v as u128 + o.v as u128) % self.p as u128) as u64 }
    }
    fn minus(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        Fp { p: self.p, v: ((self.v as u128 + (self.p - o.v) as u128) % self.p as u128) as u64 }
    }
    fn times(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        Fp { p: self.p, v: ((self.v as u128 * o.v as u128) % self.p as u128) as u64 }
    }
    fn negated(&self) -> Self {
        Fp { p: self.p, v: (self.p - self.v) % self.p }
    }
    fn inverse(&self) -> Result<Self> {
        if self.v == 0 {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid on (v, p)
        let (mut r0, mut r1) = (self.p as i128, self.v as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Ok(Fp { p: self.p, v: s0.rem_euclid(self.p as i128) as u64 })
    }
    fn same_ring(&self, o: &Self) -> bool {
        self.p == o.p
    }
    fn ring_name(&self) -> String {
        format!("F_{}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_mod_seven() {
        for x in Fp::all(7).skip(1) {
            assert_eq!(x.times(&x.inverse().unwrap()), Fp::one(7));
        }
        assert!(Fp::zero(7).inverse().is_err());
    }

    #[test]
    fn negative_representatives_reduce() {
        assert_eq!(Fp::new(5, -1).value(), 4);
        assert_eq!(Fp::new(2, 3).minus(&Fp::one(2)), Fp::zero(2));
    }
}
