use std::fmt;

use crate::arith::fp::Fp;
use crate::arith::laurent::LaurentSeries;
use crate::arith::padic::{clamp_prec, PAdic, EXACT};
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Truncated element `sum_i a_i u^i` of the mixed-characteristic field Q_p{{u}}.
///
/// Coefficients are stored for exponents in `[lo, lo + len)`. Every coefficient
/// is known modulo `p^prec`; coefficients below `lo` are declared zero modulo
/// `p^prec` (the decay condition `a_i -> 0` as `i -> -inf`), coefficients at
/// exponents `>= hi` are unknown, and all coefficients, known or not, satisfy
/// `ord_p(a_i) >= floor`.
#[derive(Clone, PartialEq)]
pub struct MixedSeries {
    p: u64,
    lo: i64,
    coeffs: Vec<PAdic>,
    hi: i64,
    prec: i64,
    floor: i64,
}

impl MixedSeries {
    /// Coefficients `coeffs[i]` at exponent `lo + i`, known for exponents `< hi`
    /// (use `EXACT` for no truncation in `u`). The p-adic precision is the
    /// smallest absolute precision among the coefficients and `prec_cap`.
    pub fn new(p: u64, lo: i64, coeffs: Vec<PAdic>, hi: i64, prec_cap: i64) -> Self {
        let prec = coeffs.iter().map(|c| c.abs_prec()).fold(clamp_prec(prec_cap), i64::min);
        let floor = coeffs
            .iter()
            .map(|c| c.val_lower_bound())
            .fold(prec, i64::min);
        let mut s = MixedSeries { p, lo, coeffs, hi: clamp_prec(hi), prec, floor };
        s.normalize();
        s
    }

    /// Same as `new` with an explicitly declared decay floor (lowered if the data violate it).
    pub fn with_floor(p: u64, lo: i64, coeffs: Vec<PAdic>, hi: i64, prec_cap: i64, floor: i64) -> Self {
        let mut s = Self::new(p, lo, coeffs, hi, prec_cap);
        s.settle_floor(floor);
        s
    }

    pub fn zero_at(p: u64, prec: i64) -> Self {
        MixedSeries::new(p, 0, Vec::new(), EXACT, prec)
    }

    /// `c u^k`, exact in `u`.
    pub fn monomial(c: PAdic, k: i64) -> Self {
        let p = c.p();
        MixedSeries::new(p, k, vec![c], EXACT, EXACT)
    }

    /// Builds from `(exponent, coefficient)` pairs.
    pub fn from_terms(p: u64, terms: &[(i64, PAdic)], hi: i64) -> Self {
        let mut acc = MixedSeries::new(p, 0, Vec::new(), hi, EXACT);
        for (k, c) in terms {
            acc = acc.add(&MixedSeries::monomial(c.clone(), *k));
        }
        acc
    }

    /// Sets the decay floor from a bound valid for the operands: exact-in-u
    /// series get the tight bound, truncated ones keep the declared bound.
    fn settle_floor(&mut self, declared: i64) {
        let tight = self.min_stored_val();
        self.floor = if self.hi >= EXACT { tight } else { declared.min(tight) };
    }

    fn min_stored_val(&self) -> i64 {
        self.coeffs.iter().map(|c| c.val_lower_bound()).fold(self.prec, i64::min)
    }

    fn normalize(&mut self) {
        let prec = self.prec;
        for c in self.coeffs.iter_mut() {
            *c = c.reduce_abs(prec);
        }
        if self.hi < EXACT {
            let keep = (self.hi - self.lo).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = self.hi.min(0);
        }
        self.floor = self.floor.min(self.prec);
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Lowest stored exponent.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Coefficients are known for exponents below `hi`.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Absolute p-adic precision shared by all coefficients.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Lower bound for the valuations of all coefficients.
    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &PAdic)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }

    /// Coefficient of `u^k`; an error when `k` lies beyond the known window.
    pub fn coeff_at(&self, k: i64) -> Result<PAdic> {
        if k >= self.hi {
            return Err(Error::precision(format!(
                "coefficient of u^{k} requested from a series known below u^{}",
                self.hi
            )));
        }
        if k < self.lo || k >= self.lo + self.coeffs.len() as i64 {
            return Ok(PAdic::zero_at(self.p, self.prec));
        }
        Ok(self.coeffs[(k - self.lo) as usize].clone())
    }

    fn stored(&self, k: i64) -> Option<&PAdic> {
        if k < self.lo {
            return None;
        }
        self.coeffs.get((k - self.lo) as usize)
    }

    fn top(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            return Err(Error::IncompatibleRings(format!("Q_{}{{{{u}}}} and Q_{}{{{{u}}}}", self.p, o.p)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "mixed series over different primes");
        let prec = self.prec.min(o.prec);
        let hi = self.hi.min(o.hi);
        let floor = self.floor.min(o.floor);
        if self.is_zero() && o.is_zero() {
            let mut z = MixedSeries::new(self.p, 0, Vec::new(), hi, prec);
            z.settle_floor(floor);
            return z;
        }
        let lo = match (self.is_zero(), o.is_zero()) {
            (true, _) => o.lo,
            (_, true) => self.lo,
            _ => self.lo.min(o.lo),
        };
        let top = self.top().max(o.top()).min(hi);
        let zero = PAdic::zero(self.p);
        let v = (lo..top.max(lo))
            .map(|k| self.stored(k).unwrap_or(&zero).plus(o.stored(k).unwrap_or(&zero)))
            .collect();
        let mut s = MixedSeries::new(self.p, lo, v, hi, prec);
        s.settle_floor(floor);
        s
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.add(o))
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = c.negated();
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Product. Coefficients are known modulo `p^min(prec_f + floor_g, prec_g + floor_f)`
    /// for exponents below `min(hi_f + lo_g, hi_g + lo_f)`.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "mixed series over different primes");
        let prec = clamp_prec((self.prec + o.floor).min(o.prec + self.floor));
        let floor = self.floor + o.floor;
        let (flo, glo) = (
            if self.is_zero() { self.hi } else { self.lo },
            if o.is_zero() { o.hi } else { o.lo },
        );
        let hi = clamp_prec(self.hi.saturating_add(glo).min(o.hi.saturating_add(flo)));
        if self.is_zero() || o.is_zero() {
            let mut z = MixedSeries::new(self.p, 0, Vec::new(), hi, prec);
            z.settle_floor(floor);
            return z;
        }
        let lo = self.lo + o.lo;
        let top = (self.top() + o.top() - 1).min(hi);
        let len = (top - lo).max(0) as usize;
        let mut v = vec![PAdic::zero(self.p); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    v[i + j] = v[i + j].plus(&a.times(b).reduce_abs(prec));
                }
            }
        }
        for c in v.iter_mut() {
            if c.is_exact_zero() {
                *c = PAdic::zero_at(self.p, prec);
            }
        }
        let mut s = MixedSeries::new(self.p, lo, v, hi, prec);
        s.settle_floor(floor);
        s
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.mul(o))
    }

    pub fn scale(&self, c: &PAdic) -> Self {
        self.mul(&MixedSeries::monomial(c.clone(), 0))
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.lo += k;
        s.hi = clamp_prec(s.hi.saturating_add(k));
        s
    }

    /// Lowers the u-truncation to `hi` and the p-adic precision to `prec`.
    pub fn truncate(&self, hi: i64, prec: i64) -> Self {
        let mut s = self.clone();
        s.hi = s.hi.min(hi);
        s.prec = s.prec.min(prec);
        s.normalize();
        s
    }

    /// Reduction modulo p of an integral element: a Laurent series over F_p known below `hi`.
    pub fn reduce_mod_p(&self) -> Result<LaurentSeries<Fp>> {
        if self.floor < 0 {
            return Err(Error::invalid("reduction mod p needs an integral element"));
        }
        if self.prec < 1 {
            return Err(Error::precision("coefficients not known modulo p"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.valuation() {
                Some(0) => Fp::new(self.p, (c.unit() % self.p).try_into().unwrap()),
                _ => Fp::zero(self.p),
            })
            .collect();
        Ok(LaurentSeries::new(Fp::zero(self.p), self.lo, coeffs, self.hi))
    }

    /// Madunts-Zhukov lift of a residue series: each coefficient replaced by its digit in `[0, p)`.
    pub fn lift(a: &LaurentSeries<Fp>, digits: u32) -> Self {
        let p = a.proto().p();
        let terms: Vec<(i64, PAdic)> = a
            .terms()
            .map(|(k, c)| (k, PAdic::from_i64(c.value() as i64, p, digits)))
            .collect();
        let mut s = MixedSeries::from_terms(p, &terms, a.prec());
        s.settle_floor(0);
        s
    }

    /// Re-expansion in a new parameter `u' = phi(u)`, `phi = c1 u + c2 u^2 + ...`
    /// with `c1` a p-adic unit and integral `c_j`. The result is known below `cap`.
    pub fn substitute_parameter(&self, phi: &LaurentSeries<PAdic>, cap: i64) -> Result<Self> {
        let psi = integral_reversion(phi, cap)?;
        self.compose_integral(&psi, cap)
    }

    /// `self(psi(u'))` for an integral `psi` with unit linear term.
    pub fn compose_integral(&self, psi: &LaurentSeries<PAdic>, cap: i64) -> Result<Self> {
        let hi = cap.min(self.hi);
        if self.is_zero() {
            return Ok(MixedSeries::new(self.p, 0, Vec::new(), hi, self.prec));
        }
        let work = hi - self.lo.min(0) + 1;
        let psi = psi.truncate(work.max(2));
        let psi_inv = psi.inv()?;
        let to_mixed = |s: &LaurentSeries<PAdic>| -> MixedSeries {
            let terms: Vec<(i64, PAdic)> = s.terms().map(|(k, c)| (k, c.clone())).collect();
            MixedSeries::from_terms(self.p, &terms, s.prec())
        };
        let mut acc = MixedSeries::new(self.p, 0, Vec::new(), hi, self.prec);
        acc.settle_floor(self.floor);
        for (k, c) in self.terms() {
            let pw = if k >= 0 {
                psi.pow(k as u32)
            } else {
                psi_inv.pow((-k) as u32)
            };
            let term = to_mixed(&pw.truncate(hi)).scale(c);
            acc = acc.add(&term);
        }
        let mut out = acc.truncate(hi, self.prec);
        out.settle_floor(self.floor);
        Ok(out)
    }

    /// Formal derivative `d/du`.
    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.times(&c.from_i64_like(self.lo + i as i64)))
            .collect();
        let mut s = MixedSeries::new(self.p, self.lo - 1, v, self.hi.saturating_sub(1), self.prec);
        s.settle_floor(self.floor);
        s
    }
}

/// Reversion of an integral series with unit linear coefficient.
pub fn integral_reversion(phi: &LaurentSeries<PAdic>, cap: i64) -> Result<LaurentSeries<PAdic>> {
    let c1 = phi.coeff_at(1)?;
    if phi.valuation() != Some(1) || c1.valuation() != Some(0) {
        return Err(Error::invalid("substitution needs a unit linear coefficient"));
    }
    if phi.terms().any(|(_, c)| c.val_lower_bound() < 0) {
        return Err(Error::invalid("substitution must have integral coefficients"));
    }
    phi.reversion(cap)
}

impl fmt::Debug for MixedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms().map(|(k, c)| format!("({})u^{k}", c.to_rational())).collect();
        if self.hi < EXACT {
            parts.push(format!("O(u^{})", self.hi));
        }
        write!(f, "{} [mod {}^{}, floor {}]", parts.join(" + "), self.p, self.prec, self.floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn c(r: crate::arith::Rational) -> PAdic {
        PAdic::from_rational(&r, 2, 20)
    }

    #[test]
    fn product_window_and_precision() {
        let f = MixedSeries::from_terms(2, &[(-1, c(rat(1, 2))), (0, c(int(1)))], 10);
        let g = MixedSeries::from_terms(2, &[(1, c(int(4)))], 5);
        let h = f.mul(&g);
        assert_eq!(h.coeff_at(0).unwrap().to_rational(), int(2));
        assert_eq!(h.coeff_at(1).unwrap().to_rational(), int(4));
        assert_eq!(h.hi(), 4);
        assert_eq!(h.floor(), 1);
    }

    #[test]
    fn reduction_and_lift_are_a_section() {
        let a = LaurentSeries::new(Fp::zero(3), -2, vec![Fp::new(3, 2), Fp::zero(3), Fp::one(3)], 5);
        let l = MixedSeries::lift(&a, 10);
        assert_eq!(l.reduce_mod_p().unwrap(), a);
    }

    #[test]
    fn window_queries() {
        let f = MixedSeries::from_terms(2, &[(3, c(int(1)))], 4);
        assert!(f.coeff_at(4).is_err());
        assert!(f.coeff_at(-7).unwrap().is_zero());
    }
}
