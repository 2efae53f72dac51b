use std::fmt;

use crate::arith::laurent::LaurentSeries;
use crate::arith::poly::Poly;
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Reduced quotient of polynomials with monic denominator.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<K: Scalar> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: Scalar> RationalFunction<K> {
    pub fn new(num: Poly<K>, den: Poly<K>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFunction { den: Poly::one(num.proto()), num });
        }
        let g = num.gcd(&den)?;
        let (mut n, mut d) = (num.div_exact(&g)?, den.div_exact(&g)?);
        let l = d.leading().unwrap().inverse()?;
        n = n.scale(&l);
        d = d.scale(&l);
        Ok(RationalFunction { num: n, den: d })
    }

    pub fn from_poly(p: Poly<K>) -> Self {
        let den = Poly::one(p.proto());
        RationalFunction { num: p, den }
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero(proto: &K) -> Self {
        Self::from_poly(Poly::zero(proto))
    }

    pub fn one(proto: &K) -> Self {
        Self::from_poly(Poly::one(proto))
    }

    /// The coordinate `t`.
    pub fn t(proto: &K) -> Self {
        Self::from_poly(Poly::monomial(proto.one_like(), 1))
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }

    pub fn den(&self) -> &Poly<K> {
        &self.den
    }

    pub fn proto(&self) -> &K {
        self.num.proto()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFunction::new(n, self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        RationalFunction::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(RationalFunction {
            num: base.num.pow(e.unsigned_abs() as u32),
            den: base.den.pow(e.unsigned_abs() as u32),
        })
    }

    pub fn scale(&self, c: &K) -> Self {
        RationalFunction::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RationalFunction::new(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Order of vanishing along the monic irreducible `pi` (negative for poles).
    pub fn ord_at(&self, pi: &Poly<K>) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::invalid("order of the zero function"));
        }
        Ok(self.num.multiplicity(pi)? as i64 - self.den.multiplicity(pi)? as i64)
    }

    /// Order at infinity: `deg den - deg num`.
    pub fn ord_at_infinity(&self) -> Result<i64> {
        match (self.num.degree(), self.den.degree()) {
            (Some(n), Some(d)) => Ok(d as i64 - n as i64),
            _ => Err(Error::invalid("order of the zero function")),
        }
    }

    /// `self(t + a)`.
    pub fn taylor_shift(&self, a: &K) -> Self {
        RationalFunction { num: self.num.taylor_shift(a), den: self.den.taylor_shift(a) }
    }

    /// `self(1/s)` as a function of `s`.
    pub fn at_infinity(&self) -> Self {
        let (dn, dd) = (self.num.degree().unwrap_or(0), self.den.degree().unwrap_or(0));
        let n = self.num.reversed();
        let d = self.den.reversed();
        let (n, d) = if dn >= dd { (n, d.shift_up(dn - dd)) } else { (n.shift_up(dd - dn), d) };
        RationalFunction::new(n, d).expect("nonzero denominator")
    }

    /// The coefficient `h(1/s) * (-1/s^2)` of `ds` for the form `h(t) dt`.
    pub fn form_at_infinity(&self) -> Self {
        let s2 = RationalFunction { num: Poly::one(self.proto()), den: Poly::monomial(self.proto().one_like(), 2) };
        self.at_infinity().mul(&s2).neg()
    }

    /// Laurent expansion at `t = 0`, known modulo `t^cap`.
    pub fn laurent_at_zero(&self, cap: i64) -> Result<LaurentSeries<K>> {
        if self.is_zero() {
            return Ok(LaurentSeries::exact_zero(self.proto()));
        }
        if self.den.degree() == Some(0) {
            let c = self.den.coeff(0).inverse()?;
            return Ok(LaurentSeries::from_poly(&self.num.scale(&c)).truncate(cap));
        }
        let n = LaurentSeries::from_poly(&self.num);
        let d = LaurentSeries::from_poly(&self.den);
        n.div_to(&d, cap)
    }

    /// Laurent expansion at the rational point `t = a` in the parameter `t - a`.
    pub fn laurent_at(&self, a: &K, cap: i64) -> Result<LaurentSeries<K>> {
        self.taylor_shift(a).laurent_at_zero(cap)
    }

    pub fn eval(&self, x: &K) -> Result<K> {
        self.num.eval(x).divided(&self.den.eval(x))
    }

    pub fn map<L: Scalar>(&self, zero: &L, f: impl Fn(&K) -> L) -> Result<RationalFunction<L>> {
        RationalFunction::new(self.num.map(zero, &f), self.den.map(zero, &f))
    }

    pub fn render(&self, var: &str, fmt_c: impl Fn(&K) -> String) -> String {
        let n = self.num.render(var, &fmt_c);
        if self.den.degree() == Some(0) {
            return n;
        }
        let d = self.den.render(var, &fmt_c);
        format!("({n})/({d})")
    }
}

impl<K: Scalar> fmt::Debug for RationalFunction<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t", |c| format!("{c:?}")))
    }
}
