//! Expansion of rational functions in the fields of vertical flags.
//!
//! At a closed point x of the fiber over p cut out by a monic irreducible q,
//! the flag field is Q_q{{u}}: coefficients in the unramified extension of Q_p
//! with residue field F_p[θ]/(q), and u = Q(t) for the monic lift Q of q with
//! digits in [0, p). All arithmetic happens in (Z/p^M)[θ]/(Q(θ)), with t
//! replaced by the Hensel lift T(u) of θ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::factor::primitive_integer;
use crate::arith::fp::Fp;
use crate::arith::padic::{clamp_prec, p_pow, EXACT};
use crate::arith::poly::Poly;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::rational::{ord_p, Rational};
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

pub(crate) type Elem = Vec<BigInt>;

/// The ring (Z/p^M)[θ]/(Q(θ)).
#[derive(Clone, Debug)]
pub(crate) struct Zq {
    p: u64,
    m: u32,
    pm: BigInt,
    modulus: Vec<BigInt>,
    residue_poly: Poly<Fp>,
    traces: Vec<BigInt>,
}

impl Zq {
    pub fn new(q: &Poly<Fp>, m: u32) -> Self {
        let p = q.proto().p();
        let pm = p_pow(p, m as u64);
        // Rational points use the canonical lift t - a with a in [0, p).
        let modulus: Vec<BigInt> = if q.degree() == Some(1) {
            vec![-BigInt::from(q.coeff(0).negated().value()), BigInt::one()]
        } else {
            q.coeffs().iter().map(|c| BigInt::from(c.value())).collect()
        };
        let mut zq = Zq { p, m, pm, modulus, residue_poly: q.clone(), traces: Vec::new() };
        zq.traces = (0..zq.d()).map(|i| zq.trace_of_power(i)).collect();
        zq
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn zero(&self) -> Elem {
        vec![BigInt::zero(); self.d()]
    }

    pub fn from_int(&self, x: &BigInt) -> Elem {
        let mut e = self.zero();
        e[0] = x.mod_floor(&self.pm);
        e
    }

    pub fn from_rational(&self, r: &Rational) -> Result<Elem> {
        let d = r.denom().mod_floor(&self.pm);
        let dinv = mod_inverse(&d, &self.pm)
            .ok_or_else(|| Error::invalid(format!("{r} is not {}-integral", self.p)))?;
        Ok(self.from_int(&(r.numer() * dinv)))
    }

    pub fn theta(&self) -> Elem {
        let mut v = vec![BigInt::zero(); self.d().max(2)];
        v[1] = BigInt::one();
        self.reduce(v)
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Elem {
        let d = self.d();
        for k in (d..v.len()).rev() {
            let c = std::mem::take(&mut v[k]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                let t = &c * &self.modulus[j];
                v[k - d + j] -= t;
            }
        }
        v.truncate(d);
        v.resize(d, BigInt::zero());
        v.iter().map(|c| c.mod_floor(&self.pm)).collect()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x + y).mod_floor(&self.pm)).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x - y).mod_floor(&self.pm)).collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        a.iter().map(|x| (-x).mod_floor(&self.pm)).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let d = self.d();
        if d == 1 {
            return vec![(&a[0] * &b[0]).mod_floor(&self.pm)];
        }
        let mut v = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        self.reduce(v)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    pub fn divisible_by_p(&self, a: &Elem) -> bool {
        let pb = BigInt::from(self.p);
        a.iter().all(|x| (x % &pb).is_zero())
    }

    fn residue(&self, a: &Elem) -> Poly<Fp> {
        let pb = BigInt::from(self.p);
        Poly::new(Fp::zero(self.p), a.iter().map(|x| Fp::new(self.p, (x % &pb).to_i64().unwrap())).collect())
    }

    /// Inverse of a unit: invert modulo p, then Newton-lift.
    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        let r = self.residue(a);
        if r.is_zero() {
            return Err(Error::ZeroAtPrecision);
        }
        let (g, s, _) = r.ext_gcd(&self.residue_poly)?;
        let s = s.scale(&g.coeff(0).inverse()?);
        let mut y = self.zero();
        for (i, c) in s.coeffs().iter().enumerate() {
            y[i] = BigInt::from(c.value());
        }
        let two = self.from_int(&BigInt::from(2));
        let mut digits = 1u32;
        while digits < self.m {
            let ay = self.mul(a, &y);
            y = self.mul(&y, &self.sub(&two, &ay));
            digits *= 2;
        }
        Ok(y)
    }

    fn trace_of_power(&self, i: usize) -> BigInt {
        let d = self.d();
        let mut tr = BigInt::zero();
        for j in 0..d {
            let mut v = vec![BigInt::zero(); (i + j + 1).max(d)];
            v[i + j] = BigInt::one();
            tr += &self.reduce(v)[j];
        }
        tr.mod_floor(&self.pm)
    }

    /// Trace down to Z/p^M.
    pub fn trace(&self, a: &Elem) -> BigInt {
        a.iter().zip(&self.traces).map(|(x, t)| x * t).sum::<BigInt>().mod_floor(&self.pm)
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Truncated Laurent series over Zq: coefficients below `lo` vanish, those at
/// exponents `>= hi` are unknown.
#[derive(Clone, Debug)]
pub(crate) struct ZqSeries {
    pub lo: i64,
    pub coeffs: Vec<Elem>,
    pub hi: i64,
}

impl ZqSeries {
    pub fn constant(c: Elem) -> Self {
        ZqSeries { lo: 0, coeffs: vec![c], hi: EXACT }
    }

    pub fn coeff(&self, zq: &Zq, k: i64) -> Result<Elem> {
        if k >= self.hi {
            return Err(Error::precision(format!("coefficient of u^{k} beyond the known window u^{}", self.hi)));
        }
        if k < self.lo {
            return Ok(zq.zero());
        }
        Ok(self.coeffs.get((k - self.lo) as usize).cloned().unwrap_or_else(|| zq.zero()))
    }

    fn top(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    pub fn truncate(&self, hi: i64) -> Self {
        let hi = hi.min(self.hi);
        let keep = (hi - self.lo).clamp(0, self.coeffs.len() as i64) as usize;
        ZqSeries { lo: self.lo, coeffs: self.coeffs[..keep].to_vec(), hi }
    }

    pub fn shift(&self, k: i64) -> Self {
        ZqSeries { lo: self.lo + k, coeffs: self.coeffs.clone(), hi: clamp_prec(self.hi + k) }
    }

    pub fn scale(&self, zq: &Zq, c: &Elem) -> Self {
        ZqSeries { lo: self.lo, coeffs: self.coeffs.iter().map(|x| zq.mul(x, c)).collect(), hi: self.hi }
    }

    pub fn add(&self, zq: &Zq, o: &Self) -> Self {
        let lo = self.lo.min(o.lo);
        let hi = self.hi.min(o.hi);
        let top = self.top().max(o.top()).min(hi);
        let coeffs = (lo..top.max(lo))
            .map(|k| zq.add(&self.coeff(zq, k).unwrap(), &o.coeff(zq, k).unwrap()))
            .collect();
        ZqSeries { lo, coeffs, hi }
    }

    pub fn neg(&self, zq: &Zq) -> Self {
        ZqSeries { lo: self.lo, coeffs: self.coeffs.iter().map(|x| zq.neg(x)).collect(), hi: self.hi }
    }

    pub fn mul(&self, zq: &Zq, o: &Self) -> Self {
        let lo = self.lo + o.lo;
        let hi = clamp_prec((self.hi + o.lo).min(o.hi + self.lo));
        let top = (self.top() + o.top() - 1).min(hi);
        let n = (top - lo).max(0) as usize;
        let d = zq.d();
        let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); 2 * d - 1]; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if zq.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= n {
                    break;
                }
                for (s, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (r, y) in b.iter().enumerate() {
                        acc[k][s + r] += x * y;
                    }
                }
            }
        }
        let coeffs = acc.into_iter().map(|v| zq.reduce(v)).collect();
        ZqSeries { lo, coeffs, hi }
    }

    /// Inverse of a power series with unit constant term, known below `hi`.
    pub fn inv_unit(&self, zq: &Zq, hi: i64) -> Result<Self> {
        debug_assert_eq!(self.lo, 0);
        let hi = hi.min(self.hi);
        let c0 = zq.inv(&self.coeff(zq, 0)?)?;
        let n = hi.max(0) as usize;
        let mut b: Vec<Elem> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(c0.clone());
                continue;
            }
            let mut s = zq.zero();
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                s = zq.add(&s, &zq.mul(&self.coeffs[j], &b[k - j]));
            }
            b.push(zq.neg(&zq.mul(&c0, &s)));
        }
        Ok(ZqSeries { lo: 0, coeffs: b, hi })
    }

    pub fn derivative(&self, zq: &Zq) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.lo + i as i64;
                zq.mul(c, &zq.from_int(&BigInt::from(k)))
            })
            .skip(if self.lo == 0 { 1 } else { 0 })
            .collect();
        let lo = if self.lo == 0 { 0 } else { self.lo - 1 };
        ZqSeries { lo, coeffs, hi: clamp_prec(self.hi - 1) }
    }

    /// Horner evaluation of an integer polynomial at this series.
    pub fn eval_poly(&self, zq: &Zq, coeffs: &[BigInt]) -> Self {
        let mut acc = ZqSeries { lo: 0, coeffs: Vec::new(), hi: EXACT };
        for c in coeffs.iter().rev() {
            acc = acc.mul(zq, self).add(zq, &ZqSeries::constant(zq.from_int(c)));
        }
        acc
    }
}

/// The Hensel lift T(u) of θ solving Q(T) = u, known below `hi`.
pub(crate) fn hensel_parameter(zq: &Zq, hi: i64) -> Result<ZqSeries> {
    let theta = zq.theta();
    if zq.d() == 1 {
        return Ok(ZqSeries { lo: 0, coeffs: vec![theta, zq.from_int(&BigInt::one())], hi: EXACT });
    }
    let dq: Vec<BigInt> = zq.modulus.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let dq_theta = ZqSeries::constant(theta.clone()).eval_poly(zq, &dq).coeff(zq, 0)?;
    let dq_inv = zq.inv(&dq_theta)?;
    let mut t = ZqSeries { lo: 0, coeffs: vec![theta], hi: EXACT };
    for k in 1..hi.max(1) {
        let trial = ZqSeries { lo: 0, coeffs: t.coeffs.clone(), hi: k + 1 };
        let val = trial.eval_poly(zq, &zq.modulus);
        let mut r = zq.neg(&val.coeff(zq, k)?);
        if k == 1 {
            r = zq.add(&r, &zq.from_int(&BigInt::one()));
        }
        t.coeffs.push(zq.mul(&r, &dq_inv));
    }
    t.hi = hi.max(1);
    Ok(t)
}

/// Splits a nonzero f = c * N0/D0 with N0, D0 primitive integer polynomials.
pub(crate) fn content_split(f: &RationalFunction<Rational>) -> (Rational, Vec<BigInt>, Vec<BigInt>) {
    let n0 = primitive_integer(f.num());
    let d0 = primitive_integer(f.den());
    let k = n0.iter().position(|c| !c.is_zero()).unwrap();
    let cn = f.num().coeff(k) / Rational::from_integer(n0[k].clone());
    let j = d0.iter().position(|c| !c.is_zero()).unwrap();
    let cd = f.den().coeff(j) / Rational::from_integer(d0[j].clone());
    (cn / cd, n0, d0)
}

/// The valuation of f along the fiber over p (the Gauss valuation), `None` for f = 0.
pub(crate) fn fiber_valuation(f: &RationalFunction<Rational>, p: u64) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    let (c, _, _) = content_split(f);
    ord_p(&c, p)
}

/// The reduction mod p of p^{-v} f, v the fiber valuation; `None` for f = 0.
pub(crate) fn fiber_reduction(f: &RationalFunction<Rational>, p: u64) -> Option<RationalFunction<Fp>> {
    let v = fiber_valuation(f, p)?;
    let (c, n0, d0) = content_split(f);
    let pv = Rational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32));
    let unit = if v >= 0 { c / pv } else { c * pv };
    let to_fp = |x: &BigInt| Fp::new(p, x.mod_floor(&BigInt::from(p)).to_i64().unwrap());
    let u = to_fp(unit.numer()).divided(&to_fp(unit.denom())).expect("unit mod p");
    let num = reduce_ints(&n0, p).scale(&u);
    RationalFunction::new(num, reduce_ints(&d0, p)).ok()
}

fn reduce_ints(v: &[BigInt], p: u64) -> Poly<Fp> {
    let pb = BigInt::from(p);
    Poly::new(Fp::zero(p), v.iter().map(|c| Fp::new(p, c.mod_floor(&pb).to_i64().unwrap())).collect())
}

/// p^v * series: the expansion of f at the point q of the fiber over p,
/// with the series known modulo p^M below `hi`.
pub(crate) struct VerticalExpansion {
    pub zq: Zq,
    pub v: i64,
    pub series: ZqSeries,
    pub t: ZqSeries,
}

/// Upper bound for the order of the denominator of f at q after reduction.
pub(crate) fn pole_depth(f: &RationalFunction<Rational>, q: &Poly<Fp>) -> Result<i64> {
    if f.is_zero() {
        return Ok(0);
    }
    let (_, _, d0) = content_split(f);
    let dbar = reduce_ints(&d0, q.proto().p());
    Ok(dbar.multiplicity(q)? as i64)
}

/// Expands f (a function of the chart variable) at the fiber point q, to relative
/// precision p^m and known below u^hi.
pub(crate) fn expand_vertical(f: &RationalFunction<Rational>, q: &Poly<Fp>, m: u32, hi: i64) -> Result<VerticalExpansion> {
    let p = q.proto().p();
    let zq = Zq::new(q, m.max(1));
    if f.is_zero() {
        let t = hensel_parameter(&zq, 2)?;
        return Ok(VerticalExpansion { zq, v: EXACT, series: ZqSeries { lo: hi, coeffs: Vec::new(), hi }, t });
    }
    let (c, n0, d0) = content_split(f);
    let v = ord_p(&c, p).unwrap();
    let pv = Rational::from_integer(p_pow(p, v.unsigned_abs()));
    let unit = if v >= 0 { c / pv } else { c * pv };
    let unit_e = zq.from_rational(&unit)?;
    let i0 = reduce_ints(&d0, p).multiplicity(q)? as i64;
    let mm = zq.m() as i64;
    let spread = mm * i0;
    let deg_d = (d0.len() as i64 - 1).max(0);
    let hi_a = hi + spread + 1;
    let hi_d = hi_a + i0;
    let hi_n = hi + spread + 1;
    let t = hensel_parameter(&zq, hi_d.max(hi_n).max(deg_d + 2) + 2)?;
    let nt = t.eval_poly(&zq, &n0).truncate(hi_n);
    let dt = t.eval_poly(&zq, &d0).truncate(hi_d);
    let i0_seen = (0..dt.top()).find(|&k| !zq.divisible_by_p(&dt.coeff(&zq, k).unwrap()));
    if i0_seen != Some(i0) {
        return Err(Error::precision("denominator order at the fiber point disagrees with its reduction"));
    }
    let a = ZqSeries { lo: 0, coeffs: dt.coeffs[i0 as usize..].to_vec(), hi: dt.hi - i0 };
    let y = ZqSeries { lo: -i0, coeffs: dt.coeffs[..i0 as usize].to_vec(), hi: EXACT };
    let a_inv = a.inv_unit(&zq, hi_a)?;
    let z = a_inv.mul(&zq, &y).neg(&zq);
    let mut s = ZqSeries::constant(zq.from_int(&BigInt::one()));
    if i0 > 0 {
        let mut term = s.clone();
        for _ in 1..mm {
            term = term.mul(&zq, &z);
            s = s.add(&zq, &term);
        }
    }
    let d_inv = a_inv.mul(&zq, &s).shift(-i0);
    let series = nt.mul(&zq, &d_inv).scale(&zq, &unit_e).truncate(hi);
    Ok(VerticalExpansion { zq, v, series, t })
}

/// `Tr res` of the form h du at the fiber point q, where h is written in the chart
/// variable; returns the value in Q/Z of the canonical character of Q_p, i.e.
/// the residue class of -p^v Tr(a_{-1}).
pub(crate) fn vertical_form_residue(h: &RationalFunction<Rational>, q: &Poly<Fp>) -> Result<Rational> {
    let p = q.proto().p();
    if h.is_zero() {
        return Ok(Rational::zero());
    }
    let v = fiber_valuation(h, p).unwrap();
    if v >= 0 {
        return Ok(Rational::zero());
    }
    let m = (-v) as u32;
    let e = expand_vertical(h, q, m, 0)?;
    let dt = e.t.derivative(&e.zq);
    let w = e.series.mul(&e.zq, &dt).coeff(&e.zq, -1)?;
    let tr = e.zq.trace(&w);
    let num = -tr;
    let den = p_pow(p, m as u64);
    let r = Rational::new(num.mod_floor(&den), den);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction<Rational> {
        let z = Rational::zero();
        let poly = |c: &[i64]| Poly::new(z.clone(), c.iter().map(|&x| int(x)).collect());
        RationalFunction::new(poly(num), poly(den)).unwrap()
    }

    fn fpoly(p: u64, c: &[i64]) -> Poly<Fp> {
        Poly::new(Fp::zero(p), c.iter().map(|&x| Fp::new(p, x)).collect())
    }

    fn int_coeff(e: &VerticalExpansion, k: i64) -> BigInt {
        e.series.coeff(&e.zq, k).unwrap()[0].clone()
    }

    #[test]
    fn simple_pole_along_the_fiber() {
        let f = rf(&[1], &[0, 2]);
        let e = expand_vertical(&f, &fpoly(2, &[0, 1]), 8, 4).unwrap();
        assert_eq!(e.v, -1);
        assert_eq!(int_coeff(&e, -1), BigInt::one());
        assert!(int_coeff(&e, 0).is_zero());
        assert_eq!(vertical_form_residue(&f, &fpoly(2, &[0, 1])).unwrap(), rat(1, 2));
    }

    #[test]
    fn pole_congruent_to_the_point() {
        // 1/(t - 2) = Σ 2^k u^{-1-k} in Q_2{{u}}.
        let f = rf(&[1], &[-2, 1]);
        let e = expand_vertical(&f, &fpoly(2, &[0, 1]), 6, 3).unwrap();
        assert_eq!(e.v, 0);
        for k in 0..6 {
            assert_eq!(int_coeff(&e, -1 - k), BigInt::from(1u64 << k));
        }
        assert_eq!(vertical_form_residue(&f, &fpoly(2, &[0, 1])).unwrap(), rat(0, 1));
    }

    #[test]
    fn canonical_lift_at_nonzero_class() {
        // At t ≡ 1 mod 3 the parameter is u = t - 1, so t = 1 + u.
        let f = rf(&[0, 1], &[1]);
        let e = expand_vertical(&f, &fpoly(3, &[-1, 1]), 4, 3).unwrap();
        assert_eq!(int_coeff(&e, 0), BigInt::one());
        assert_eq!(int_coeff(&e, 1), BigInt::one());
    }

    #[test]
    fn residues_at_points_of_degree_two() {
        // Over F_2 the form dt/(t(t^2+t+1)) has residue 1 at t = 0 and none at
        // infinity, so the quadratic point carries trace residue 1.
        let h = rf(&[1], &[0, 2, 2, 2]);
        assert_eq!(vertical_form_residue(&h, &fpoly(2, &[1, 1, 1])).unwrap(), rat(1, 2));
        assert_eq!(vertical_form_residue(&h, &fpoly(2, &[0, 1])).unwrap(), rat(1, 2));
        let h = rf(&[1], &[0, 3, 0, 3]);
        assert_eq!(vertical_form_residue(&h, &fpoly(3, &[1, 0, 1])).unwrap(), rat(1, 3));
        assert_eq!(vertical_form_residue(&h, &fpoly(3, &[0, 1])).unwrap(), rat(2, 3));
    }

    #[test]
    fn hensel_parameter_solves_the_lift() {
        let q = fpoly(3, &[1, 0, 1]);
        let zq = Zq::new(&q, 5);
        let t = hensel_parameter(&zq, 6).unwrap();
        let val = t.eval_poly(&zq, &zq.modulus);
        for k in 0..6 {
            let c = val.coeff(&zq, k).unwrap();
            let want = if k == 1 { zq.from_int(&BigInt::one()) } else { zq.zero() };
            assert_eq!(c, want, "coefficient {k}");
        }
    }
}
