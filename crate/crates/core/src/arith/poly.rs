use std::fmt;

use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients from degree 0 upward.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly<K: Scalar> {
    zero: K,
    coeffs: Vec<K>,
}

impl<K: Scalar> Poly<K> {
    pub fn new(zero: K, coeffs: Vec<K>) -> Self {
        let mut p = Poly { zero: zero.zero_like(), coeffs };
        p.trim();
        p
    }

    pub fn zero(proto: &K) -> Self {
        Poly { zero: proto.zero_like(), coeffs: Vec::new() }
    }

    pub fn constant(c: K) -> Self {
        Poly::new(c.zero_like(), vec![c])
    }

    pub fn one(proto: &K) -> Self {
        Poly::constant(proto.one_like())
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: K, k: usize) -> Self {
        let mut v = vec![c.zero_like(); k];
        v.push(c);
        Poly::new(v[0].zero_like(), v)
    }

    /// `t - a`.
    pub fn linear_root(a: &K) -> Self {
        Poly::new(a.zero_like(), vec![a.negated(), a.one_like()])
    }

    pub fn proto(&self) -> &K {
        &self.zero
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.vanishes()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn leading(&self) -> Option<&K> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == c.one_like())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect();
        Poly::new(self.zero.clone(), v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect();
        Poly::new(self.zero.clone(), v)
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.zero.clone(), self.coeffs.iter().map(|c| c.negated()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.zero);
        }
        let mut v = vec![self.zero.clone(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].plus(&a.times(b));
            }
        }
        Poly::new(self.zero.clone(), v)
    }

    pub fn scale(&self, c: &K) -> Self {
        Poly::new(self.zero.clone(), self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one(&self.zero);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.zero.clone(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(self.zero.clone(), v)
    }

    /// Euclidean division; the divisor's leading coefficient must be invertible.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d.leading().ok_or(Error::DivisionByZero)?.inverse()?;
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(&self.zero), self.clone()));
        }
        let mut q = vec![self.zero.clone(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].times(&dl);
            if !c.vanishes() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[i + j] = r[i + j].minus(&c.times(b));
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(self.zero.clone(), q), Poly::new(self.zero.clone(), r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Exact quotient; fails if the division leaves a remainder.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::invalid("polynomial division is not exact"));
        }
        Ok(q)
    }

    pub fn make_monic(&self) -> Result<Self> {
        match self.leading() {
            None => Ok(self.clone()),
            Some(l) => Ok(self.scale(&l.inverse()?)),
        }
    }

    /// Monic gcd over a field.
    pub fn gcd(&self, o: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> Result<(Self, Self, Self)> {
        let z = &self.zero;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(z), Poly::zero(z));
        let (mut t0, mut t1) = (Poly::zero(z), Poly::one(z));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        match r0.leading().cloned() {
            None => Ok((r0, s0, t0)),
            Some(l) => {
                let li = l.inverse()?;
                Ok((r0.scale(&li), s0.scale(&li), t0.scale(&li)))
            }
        }
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.times(&c.from_i64_like(i as i64)))
            .collect();
        Poly::new(self.zero.clone(), v)
    }

    /// Substitution `self(g(t))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Poly::zero(&self.zero);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Taylor shift `self(t + a)`.
    pub fn taylor_shift(&self, a: &K) -> Self {
        let g = Poly::new(self.zero.clone(), vec![a.clone(), a.one_like()]);
        self.compose(&g)
    }

    /// Coefficients reversed: `t^deg * self(1/t)`.
    pub fn reversed(&self) -> Self {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::new(self.zero.clone(), v)
    }

    /// Number of times `d` divides `self` (self nonzero, d nonconstant).
    pub fn multiplicity(&self, d: &Self) -> Result<u32> {
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.div_rem(d)?;
            if !r.is_zero() || cur.is_zero() {
                return Ok(k);
            }
            cur = q;
            k += 1;
        }
    }

    pub fn map<L: Scalar>(&self, zero: &L, f: impl Fn(&K) -> L) -> Poly<L> {
        Poly::new(zero.zero_like(), self.coeffs.iter().map(f).collect())
    }

    /// Writes the polynomial in the variable `var`.
    pub fn render(&self, var: &str, fmt_c: impl Fn(&K) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.vanishes() {
                continue;
            }
            let cs = fmt_c(c);
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(match (i, cs.as_str()) {
                (0, _) => cs,
                (_, "1") => mono,
                (_, "-1") => format!("-{mono}"),
                _ => format!("{cs}*{mono}"),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl<K: Scalar> fmt::Debug for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t", |c| format!("{c:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp::Fp;
    use crate::arith::rational::{int, Rational};

    fn q(v: &[i64]) -> Poly<Rational> {
        Poly::new(int(0), v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn division_identity() {
        let a = q(&[1, 2, 3, 4]);
        let b = q(&[1, 1]);
        let (qq, r) = a.div_rem(&b).unwrap();
        assert_eq!(qq.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_and_bezout() {
        let a = q(&[-1, 0, 1]);
        let b = q(&[1, 1]).mul(&q(&[2, 1]));
        let (g, s, t) = a.ext_gcd(&b).unwrap();
        assert_eq!(g, q(&[1, 1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn taylor_shift_and_reverse() {
        let a = q(&[0, 0, 1]);
        assert_eq!(a.taylor_shift(&int(1)), q(&[1, 2, 1]));
        assert_eq!(q(&[1, 2, 3]).reversed(), q(&[3, 2, 1]));
    }

    #[test]
    fn over_f2() {
        let p = Poly::new(Fp::zero(2), vec![Fp::one(2), Fp::one(2), Fp::one(2)]);
        assert_eq!(p.eval(&Fp::zero(2)), Fp::one(2));
        assert_eq!(p.eval(&Fp::one(2)), Fp::one(2));
        assert_eq!(p.derivative(), Poly::constant(Fp::one(2)));
    }
}
