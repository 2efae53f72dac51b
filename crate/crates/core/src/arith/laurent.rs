use std::fmt;

use crate::arith::padic::{clamp_prec, EXACT};
use crate::arith::poly::Poly;
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Truncated formal Laurent series `sum_{i >= lo} a_i t^i + O(t^prec)`.
///
/// `prec == EXACT` marks a series known exactly (a Laurent polynomial).
/// After normalization the first stored coefficient is nonzero, so `lo` is the
/// valuation; a series with no stored coefficients is zero at precision `prec`.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C: Scalar> {
    zero: C,
    lo: i64,
    coeffs: Vec<C>,
    prec: i64,
}

impl<C: Scalar> LaurentSeries<C> {
    /// Series with coefficients `coeffs[i]` at exponent `lo + i`, known modulo `t^prec`.
    pub fn new(zero: C, lo: i64, coeffs: Vec<C>, prec: i64) -> Self {
        let mut s = LaurentSeries { zero: zero.zero_like(), lo, coeffs, prec: clamp_prec(prec) };
        s.normalize();
        s
    }

    pub fn zero_at(proto: &C, prec: i64) -> Self {
        LaurentSeries::new(proto.zero_like(), clamp_prec(prec), Vec::new(), prec)
    }

    pub fn exact_zero(proto: &C) -> Self {
        Self::zero_at(proto, EXACT)
    }

    /// The exact monomial `c t^k`.
    pub fn monomial(c: C, k: i64) -> Self {
        LaurentSeries::new(c.zero_like(), k, vec![c], EXACT)
    }

    pub fn one(proto: &C) -> Self {
        Self::monomial(proto.one_like(), 0)
    }

    /// Exact series from `(exponent, coefficient)` pairs.
    pub fn from_terms(proto: &C, terms: &[(i64, C)], prec: i64) -> Self {
        let mut acc = Self::zero_at(proto, prec);
        for (k, c) in terms {
            acc = acc.add(&Self::monomial(c.clone(), *k).truncate(prec));
        }
        acc
    }

    /// Exact series of a polynomial in `t`.
    pub fn from_poly(p: &Poly<C>) -> Self {
        LaurentSeries::new(p.proto().clone(), 0, p.coeffs().to_vec(), EXACT)
    }

    fn normalize(&mut self) {
        if self.prec < EXACT {
            let keep = (self.prec - self.lo).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().is_some_and(|c| c.vanishes()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.vanishes()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = self.prec;
        }
    }

    pub fn proto(&self) -> &C {
        &self.zero
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Truncation order: the series is known modulo `t^prec`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation, `None` when zero at precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo)
        }
    }

    /// Valuation, or the precision for a series that is zero at precision.
    fn val_or_prec(&self) -> i64 {
        self.lo
    }

    /// Exponent just past the last stored coefficient.
    pub fn top(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    /// Stored nonzero terms `(exponent, coefficient)` in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.vanishes())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }

    /// Coefficient of `t^k`; querying at or beyond the truncation order is an error.
    pub fn coeff_at(&self, k: i64) -> Result<C> {
        if k >= self.prec {
            return Err(Error::precision(format!(
                "coefficient of t^{k} requested from a series known modulo t^{}",
                self.prec
            )));
        }
        Ok(self.raw_coeff(k))
    }

    fn raw_coeff(&self, k: i64) -> C {
        if k < self.lo || k >= self.top() {
            self.zero.clone()
        } else {
            self.coeffs[(k - self.lo) as usize].clone()
        }
    }

    pub fn truncate(&self, n: i64) -> Self {
        if n >= self.prec {
            return self.clone();
        }
        LaurentSeries::new(self.zero.clone(), self.lo, self.coeffs.clone(), n)
    }

    fn check_ring(&self, o: &Self) -> Result<()> {
        if self.zero.same_ring(&o.zero) {
            Ok(())
        } else {
            Err(Error::IncompatibleRings(format!(
                "{} and {}",
                self.zero.ring_name(),
                o.zero.ring_name()
            )))
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_ring(o)?;
        Ok(self.add(o))
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        if self.is_zero() && o.is_zero() {
            return Self::zero_at(&self.zero, prec);
        }
        let lo = match (self.is_zero(), o.is_zero()) {
            (true, _) => o.lo,
            (_, true) => self.lo,
            _ => self.lo.min(o.lo),
        }
        .min(prec);
        // A zero operand stores nothing, but its `lo` sits at its precision.
        let top = |s: &Self| if s.is_zero() { i64::MIN } else { s.top() };
        let hi = top(self).max(top(o)).min(prec);
        let v = (lo..hi).map(|k| self.raw_coeff(k).plus(&o.raw_coeff(k))).collect();
        LaurentSeries::new(self.zero.clone(), lo, v, prec)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries::new(
            self.zero.clone(),
            self.lo,
            self.coeffs.iter().map(|c| c.negated()).collect(),
            self.prec,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        LaurentSeries::new(
            self.zero.clone(),
            self.lo,
            self.coeffs.iter().map(|a| a.times(c)).collect(),
            self.prec,
        )
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        let prec = if self.is_exact() { EXACT } else { self.prec + k };
        LaurentSeries::new(self.zero.clone(), self.lo + k, self.coeffs.clone(), prec)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_ring(o)?;
        Ok(self.mul(o))
    }

    /// Product; known modulo `t^min(N_f + v_g, N_g + v_f)`.
    pub fn mul(&self, o: &Self) -> Self {
        let prec = clamp_prec((self.prec + o.val_or_prec()).min(o.prec + self.val_or_prec()));
        if self.is_zero() || o.is_zero() {
            return Self::zero_at(&self.zero, prec);
        }
        let lo = self.lo + o.lo;
        let len = ((self.coeffs.len() + o.coeffs.len() - 1) as i64).min((prec - lo).max(0)) as usize;
        let mut v = vec![self.zero.clone(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.vanishes() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                v[i + j] = v[i + j].plus(&a.times(b));
            }
        }
        LaurentSeries::new(self.zero.clone(), lo, v, prec)
    }

    /// Inverse known modulo `t^min(N - 2v, cap)`.
    pub fn inv_to(&self, cap: i64) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroAtPrecision);
        }
        let a = self.lo;
        let prec = if self.is_exact() { cap } else { (self.prec - 2 * a).min(cap) };
        if prec >= EXACT {
            return Err(Error::precision(
                "the inverse of an exact series needs an explicit truncation order",
            ));
        }
        let n = (prec + a).max(0) as usize; // coefficients of the power-series part
        let a0inv = self.coeffs[0].inverse()?;
        let mut b: Vec<C> = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = if k == 0 { self.zero.one_like() } else { self.zero.clone() };
            for i in 1..=k.min(self.coeffs.len() - 1) {
                s = s.minus(&self.coeffs[i].times(&b[k - i]));
            }
            b.push(s.times(&a0inv));
        }
        Ok(LaurentSeries::new(self.zero.clone(), -a, b, prec))
    }

    pub fn inv(&self) -> Result<Self> {
        self.inv_to(EXACT)
    }

    /// Quotient `self / o` known modulo `t^cap` at most.
    pub fn div_to(&self, o: &Self, cap: i64) -> Result<Self> {
        o.valuation().ok_or(Error::ZeroAtPrecision)?;
        let sv = self.valuation().unwrap_or(self.prec);
        // the inverse must be known far enough to pin the product down to cap
        let inv = o.inv_to(cap - sv)?;
        Ok(self.mul(&inv).truncate(cap))
    }

    /// Formal derivative `d/dt`.
    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.times(&c.from_i64_like(self.lo + i as i64)))
            .collect();
        let prec = if self.is_exact() { EXACT } else { self.prec - 1 };
        LaurentSeries::new(self.zero.clone(), self.lo - 1, v, prec)
    }

    /// Nonnegative integer power.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.zero);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitution `self(s)` for a series `s` of positive valuation `k`.
    ///
    /// Known modulo `t^min(k N_f, k lo + N_s - k)`; for an exact `self` with
    /// exact `s` the result is truncated at `cap`.
    pub fn compose(&self, s: &Self, cap: i64) -> Result<Self> {
        self.check_ring(s)?;
        let k = s
            .valuation()
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::invalid("substituted series must have positive valuation"))?;
        if self.is_zero() {
            return Ok(Self::zero_at(&self.zero, (k * self.prec).min(cap)));
        }
        let lo = self.lo;
        let mut prec = cap;
        if !self.is_exact() {
            prec = prec.min(k * self.prec);
        }
        if !s.is_exact() {
            prec = prec.min(k * lo + s.prec - k);
        }
        if prec >= EXACT {
            return Err(Error::precision("composition of exact series needs an explicit cap"));
        }
        let work = prec - k * lo.min(0); // working precision for the power-series part
        let st = s.truncate(work.max(k));
        // Horner on the power-series part F(t) = sum a_{lo+i} t^i
        let mut acc = Self::zero_at(&self.zero, work);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&st).add(&Self::monomial(c.clone(), 0).truncate(work)).truncate(work);
        }
        let head = if lo >= 0 {
            st.pow(lo as u32)
        } else {
            s.truncate(prec - k * lo + k).inv()?.pow((-lo) as u32)
        };
        Ok(acc.mul(&head).truncate(prec))
    }

    /// The series `psi` with `self(psi(s)) = s`; `self` must be `c1 t + c2 t^2 + ...`, `c1` invertible.
    pub fn reversion(&self, cap: i64) -> Result<Self> {
        if self.valuation() != Some(1) {
            return Err(Error::invalid("reversion needs a series of valuation exactly 1"));
        }
        let c1inv = self.coeffs[0]
            .inverse()
            .map_err(|_| Error::invalid("linear coefficient of the substitution is not invertible"))?;
        let prec = if self.is_exact() { cap } else { self.prec.min(cap) };
        let higher = self.sub(&Self::monomial(self.coeffs[0].clone(), 1));
        let t = Self::monomial(self.zero.one_like(), 1);
        let mut psi = t.scale(&c1inv).truncate(prec);
        // each pass fixes one more coefficient
        for _ in 0..prec.max(1) {
            let h = if higher.is_zero() {
                Self::zero_at(&self.zero, prec)
            } else {
                higher.compose(&psi, prec)?
            };
            let next = t.sub(&h).scale(&c1inv).truncate(prec);
            if next == psi {
                break;
            }
            psi = next;
        }
        Ok(psi)
    }

    /// Re-expansion in a new parameter `t' = phi(t)`.
    pub fn substitute_parameter(&self, phi: &Self, cap: i64) -> Result<Self> {
        let psi = phi.reversion(cap)?;
        self.compose(&psi, cap)
    }

    /// Coefficient-wise image in another ring.
    pub fn map<D: Scalar>(&self, zero: &D, f: impl Fn(&C) -> D) -> LaurentSeries<D> {
        LaurentSeries::new(zero.zero_like(), self.lo, self.coeffs.iter().map(f).collect(), self.prec)
    }
}

impl<C: Scalar> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms().map(|(k, c)| format!("({c:?})t^{k}")).collect();
        if !self.is_exact() {
            parts.push(format!("O(t^{})", self.prec));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat, Rational};

    fn q(lo: i64, v: &[i64], prec: i64) -> LaurentSeries<Rational> {
        LaurentSeries::new(int(0), lo, v.iter().map(|&x| int(x)).collect(), prec)
    }

    #[test]
    fn product_of_pole_and_parameter() {
        let f = q(-1, &[1, 1], EXACT);
        let g = q(1, &[1], EXACT);
        assert_eq!(f.mul(&g), q(0, &[1, 1], EXACT));
    }

    #[test]
    fn geometric_series() {
        let f = q(0, &[1, -1], 10);
        let inv = f.inv().unwrap();
        assert_eq!(inv, q(0, &[1; 10], 10));
    }

    #[test]
    fn derivative_of_inverse_parameter() {
        assert_eq!(q(-1, &[1], EXACT).derivative(), q(-2, &[-1], EXACT));
    }

    #[test]
    fn coefficient_queries() {
        let f = q(-1, &[3, 5, 1], 3);
        assert_eq!(f.coeff_at(-1).unwrap(), int(3));
        assert_eq!(f.coeff_at(2).unwrap(), int(0));
        assert!(f.coeff_at(5).unwrap_err().is_precision());
    }

    #[test]
    fn precision_rule_for_products() {
        let f = q(-2, &[1, 1], 5);
        let g = q(1, &[2], 4);
        assert_eq!(f.mul(&g).prec(), 2);
    }

    #[test]
    fn linear_rescale_substitution() {
        let x = q(1, &[1], EXACT);
        let phi = LaurentSeries::monomial(int(2), 1);
        let y = x.substitute_parameter(&phi, 10).unwrap();
        assert_eq!(y.coeff_at(1).unwrap(), rat(1, 2));
        assert_eq!(y.coeff_at(2).unwrap(), int(0));
    }

    #[test]
    fn adding_to_an_exact_zero() {
        let m = LaurentSeries::monomial(2.0, -1);
        assert_eq!(LaurentSeries::exact_zero(&0.0).add(&m), m);
        assert_eq!(m.add(&LaurentSeries::exact_zero(&0.0)), m);
    }

    #[test]
    fn reversion_of_t_over_one_plus_t() {
        // t' = t/(1+t) has inverse t = t'/(1-t')
        let phi = q(0, &[1, 1], 12).inv().unwrap().shift(1);
        let psi = phi.reversion(10).unwrap();
        for k in 1..10 {
            assert_eq!(psi.coeff_at(k).unwrap(), int(1));
        }
        let x = q(-1, &[1], EXACT).substitute_parameter(&phi, 8).unwrap();
        assert_eq!(x.coeff_at(-1).unwrap(), int(1));
        assert_eq!(x.coeff_at(0).unwrap(), int(-1));
        assert_eq!(x.coeff_at(3).unwrap(), int(0));
    }

    #[test]
    fn incompatible_rings() {
        use crate::arith::fp::Fp;
        let a = LaurentSeries::monomial(Fp::one(2), 0);
        let b = LaurentSeries::monomial(Fp::one(3), 0);
        assert!(matches!(a.try_add(&b), Err(Error::IncompatibleRings(_))));
    }
}
