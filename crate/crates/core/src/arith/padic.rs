use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::rational::{frac_mod1, ord_p_int, Rational};
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Absolute precision sentinel for exactly known values.
pub const EXACT: i64 = i64::MAX / 4;

/// Relative precision used for integers such as 1 or the factor `i` in a derivative.
pub const INTEGER_DIGITS: u32 = 512;

/// Maps every precision in the exact range (offsets of `EXACT` by window sizes) back to `EXACT`.
pub(crate) fn clamp_prec(x: i64) -> i64 {
    if x >= EXACT / 2 {
        EXACT
    } else {
        x
    }
}

pub fn p_pow(p: u64, k: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// A p-adic number `p^val * unit + O(p^(val + prec))`.
///
/// The unit is stored as an integer in `[0, p^prec)` not divisible by `p`.
/// Zero at precision `N` is stored with `unit = 0`, `prec = 0` and `val = N`;
/// an exact zero uses `val = EXACT`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: u32,
}

impl PAdic {
    pub fn zero(p: u64) -> Self {
        PAdic { p, val: EXACT, unit: BigInt::zero(), prec: 0 }
    }

    /// The element `O(p^abs)`.
    pub fn zero_at(p: u64, abs: i64) -> Self {
        PAdic { p, val: clamp_prec(abs), unit: BigInt::zero(), prec: 0 }
    }

    /// Builds `p^base * x + O(p^(base + digits))` from an arbitrary integer `x`.
    pub fn from_scaled_int(p: u64, x: &BigInt, base: i64, digits: i64) -> Self {
        if digits <= 0 {
            return PAdic::zero_at(p, base + digits);
        }
        let modulus = p_pow(p, digits as u64);
        let r = x.mod_floor(&modulus);
        if r.is_zero() {
            return PAdic::zero_at(p, base + digits);
        }
        let k = ord_p_int(&r, p).unwrap();
        let unit = r / p_pow(p, k as u64);
        PAdic { p, val: base + k, unit, prec: (digits - k) as u32 }
    }

    /// p-adic expansion of a rational with `m` digits of relative precision.
    pub fn from_rational(r: &Rational, p: u64, m: u32) -> Self {
        if r.is_zero() {
            return PAdic::zero(p);
        }
        let v = ord_p_int(r.numer(), p).unwrap() - ord_p_int(r.denom(), p).unwrap();
        Self::from_rational_abs(r, p, v + m as i64)
    }

    /// p-adic expansion of a rational known to absolute precision `abs`.
    pub fn from_rational_abs(r: &Rational, p: u64, abs: i64) -> Self {
        if r.is_zero() {
            return PAdic::zero(p);
        }
        let vn = ord_p_int(r.numer(), p).unwrap();
        let vd = ord_p_int(r.denom(), p).unwrap();
        let v = vn - vd;
        let digits = abs - v;
        if digits <= 0 {
            return PAdic::zero_at(p, abs);
        }
        let modulus = p_pow(p, digits as u64);
        let n = r.numer() / p_pow(p, vn as u64);
        let d = r.denom() / p_pow(p, vd as u64);
        let dinv = mod_inverse(&d, &modulus).expect("denominator prime to p");
        let unit = (n * dinv).mod_floor(&modulus);
        PAdic { p, val: v, unit, prec: digits as u32 }
    }

    pub fn from_i64(n: i64, p: u64, m: u32) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)), p, m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_zero() && self.val >= EXACT
    }

    /// `None` when the element is zero at its precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lower bound for the valuation: the valuation, or the absolute precision for zero.
    pub fn val_lower_bound(&self) -> i64 {
        self.val
    }

    /// Absolute precision: the element is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        clamp_prec(self.val + self.prec as i64)
    }

    /// Number of known digits of the unit part.
    pub fn rel_prec(&self) -> u32 {
        self.prec
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.prec as usize);
        let mut u = self.unit.clone();
        let pb = BigInt::from(self.p);
        for _ in 0..self.prec {
            let (q, r) = u.div_rem(&pb);
            out.push(r.to_u64().unwrap());
            u = q;
        }
        out
    }

    /// The rational number `p^val * unit` (the truncated expansion itself).
    pub fn to_rational(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let u = Rational::from_integer(self.unit.clone());
        if self.val >= 0 {
            u * Rational::from_integer(p_pow(self.p, self.val as u64))
        } else {
            u / Rational::from_integer(p_pow(self.p, (-self.val) as u64))
        }
    }

    /// The rational a/b with |a|, |b| ≤ sqrt(M/2), M = p^rel_prec, congruent to
    /// the value at its precision; `None` when no such fraction exists.
    pub fn reconstruct(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        let m = p_pow(self.p, self.prec as u64);
        let bound = (&m / 2u32).sqrt();
        let (mut r0, mut r1) = (m.clone(), self.unit.clone());
        let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
        while r1 > bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let s2 = &s0 - &q * &s1;
            (r0, r1, s0, s1) = (r1, r2, s1, s2);
        }
        if s1.is_zero() || s1.abs() > bound || !r1.gcd(&s1).is_one() || (&s1 % self.p).is_zero() {
            return None;
        }
        let u = Rational::new(r1, s1);
        let scale = Rational::from_integer(p_pow(self.p, self.val.unsigned_abs()));
        Some(if self.val >= 0 { u * scale } else { u / scale })
    }

    /// Drops precision to at most `abs` (absolute).
    pub fn reduce_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        if self.is_zero() || abs <= self.val {
            return PAdic::zero_at(self.p, abs);
        }
        let digits = (abs - self.val) as u64;
        PAdic {
            p: self.p,
            val: self.val,
            unit: self.unit.mod_floor(&p_pow(self.p, digits)),
            prec: digits as u32,
        }
    }

    /// Value of `self` as an integer `x` with `self = p^base * x + O(p^(base+digits))`.
    /// Requires `base <= valuation`.
    fn scaled_to(&self, base: i64) -> BigInt {
        if self.is_zero() {
            BigInt::zero()
        } else {
            &self.unit * p_pow(self.p, (self.val - base) as u64)
        }
    }

    /// Principal part `sum_{i<0} a_i p^i` as a rational in [0, 1).
    pub fn principal_part(&self) -> Result<Rational> {
        if self.abs_prec() < 0 {
            return Err(Error::precision(format!(
                "p-adic number known only modulo {}^{}",
                self.p,
                self.abs_prec()
            )));
        }
        if self.is_zero() || self.val >= 0 {
            return Ok(Rational::zero());
        }
        let k = (-self.val) as u64;
        let m = p_pow(self.p, k);
        let x = self.unit.mod_floor(&m);
        Ok(frac_mod1(&Rational::new(x, m)))
    }

    /// Equality modulo `p^abs` where `abs` is the smaller of the two precisions.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.minus(other).is_zero()
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else if (-e.gcd.clone()).is_one() {
        Some((-e.x).mod_floor(m))
    } else {
        None
    }
}

impl fmt::Debug for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            if self.val >= EXACT {
                write!(f, "0")
            } else {
                write!(f, "O({}^{})", self.p, self.val)
            }
        } else {
            write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.val, self.p, self.abs_prec())
        }
    }
}

impl Scalar for PAdic {
    fn zero_like(&self) -> Self {
        PAdic::zero(self.p)
    }
    fn one_like(&self) -> Self {
        // integers are exact, but the representation needs a digit count;
        // INTEGER_DIGITS is far beyond any working precision
        PAdic { p: self.p, val: 0, unit: BigInt::one(), prec: INTEGER_DIGITS }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        PAdic::from_i64(n, self.p, INTEGER_DIGITS)
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "p-adic numbers over different primes");
        if self.is_zero() && self.val >= o.abs_prec() {
            return o.clone();
        }
        if o.is_zero() && o.val >= self.abs_prec() {
            return self.clone();
        }
        let abs = self.abs_prec().min(o.abs_prec());
        let base = self.val.min(o.val);
        let x = self.scaled_to(base) + o.scaled_to(base);
        PAdic::from_scaled_int(self.p, &x, base, abs - base)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negated())
    }
    fn times(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "p-adic numbers over different primes");
        match (self.is_zero(), o.is_zero()) {
            (true, true) => PAdic::zero_at(self.p, self.val.saturating_add(o.val)),
            (true, false) => PAdic::zero_at(self.p, self.val + o.val),
            (false, true) => PAdic::zero_at(self.p, self.val + o.val),
            (false, false) => {
                let prec = self.prec.min(o.prec);
                let m = p_pow(self.p, prec as u64);
                PAdic {
                    p: self.p,
                    val: self.val + o.val,
                    unit: (&self.unit * &o.unit).mod_floor(&m),
                    prec,
                }
            }
        }
    }
    fn negated(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = p_pow(self.p, self.prec as u64);
        PAdic { p: self.p, val: self.val, unit: (&m - &self.unit).mod_floor(&m), prec: self.prec }
    }
    fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroAtPrecision);
        }
        let m = p_pow(self.p, self.prec as u64);
        let unit = mod_inverse(&self.unit, &m).expect("unit is prime to p");
        Ok(PAdic { p: self.p, val: -self.val, unit, prec: self.prec })
    }
    fn same_ring(&self, o: &Self) -> bool {
        self.p == o.p
    }
    fn ring_name(&self) -> String {
        format!("Q_{}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn reconstruction() {
        for r in [int(-1), rat(1, 3), rat(-5, 12), rat(7, 9)] {
            assert_eq!(PAdic::from_rational(&r, 2, 40).reconstruct(), Some(r.clone()), "{r}");
        }
        assert_eq!(PAdic::from_rational(&rat(1, 3), 2, 4).reconstruct(), None);
    }

    #[test]
    fn one_third_in_z2() {
        let x = PAdic::from_rational(&rat(1, 3), 2, 4);
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.digits(), vec![1, 1, 0, 1]);
        // 3 * (1 + 2 + 8) = 33 = 1 mod 16
        assert_eq!((3 * 11) % 16, 1);
    }

    #[test]
    fn valuations_of_embeddings() {
        let four = PAdic::from_rational(&int(4), 2, 5);
        assert_eq!(four.valuation(), Some(2));
        assert_eq!(four.digits()[0], 1);
        let sixth = PAdic::from_rational(&rat(1, 6), 2, 8);
        assert_eq!(sixth.valuation(), Some(-1));
        let third = PAdic::from_rational(&rat(1, 3), 2, 8);
        assert_eq!(sixth.unit(), third.unit());
    }

    #[test]
    fn inverse_pair_and_cancellation() {
        let a = PAdic::from_rational(&rat(1, 3), 2, 16);
        let b = PAdic::from_rational(&int(3), 2, 16);
        assert!(a.times(&b).eq_at_precision(&PAdic::from_rational(&int(1), 2, 16)));
        let z = a.plus(&a.negated());
        assert!(z.is_zero());
        assert_eq!(z.abs_prec(), 16);
    }

    #[test]
    fn halves_in_q3() {
        let h = PAdic::from_rational(&rat(1, 2), 3, 10);
        assert!(h.plus(&h).eq_at_precision(&PAdic::from_rational(&int(1), 3, 10)));
    }

    #[test]
    fn precision_follows_the_weaker_operand() {
        let a = PAdic::from_rational(&rat(1, 2), 3, 10);
        let b = PAdic::from_rational(&int(3), 3, 4);
        assert_eq!(a.plus(&b).abs_prec(), 5);
        assert_eq!(a.times(&b).rel_prec(), 4);
    }

    #[test]
    fn principal_parts() {
        assert_eq!(PAdic::from_rational(&rat(1, 5), 5, 8).principal_part().unwrap(), rat(1, 5));
        assert_eq!(PAdic::from_rational(&int(7), 3, 8).principal_part().unwrap(), int(0));
        assert_eq!(PAdic::from_rational(&rat(1, 6), 2, 8).principal_part().unwrap(), rat(1, 2));
        assert!(PAdic::zero_at(2, -3).principal_part().is_err());
    }

    #[test]
    fn inverting_zero_fails() {
        assert_eq!(PAdic::zero_at(2, 5).inverse(), Err(Error::ZeroAtPrecision));
    }
}
