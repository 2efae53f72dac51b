use std::fmt;

use crate::arith::factor::{factor_fp, is_irreducible_fp, is_irreducible_q, squarefree_q};
use crate::arith::fp::Fp;
use crate::arith::poly::Poly;
use crate::arith::rational::{format_rational, Rational};
use crate::arith::scalar::Scalar;
use crate::error::{Error, Result};

/// Base fields supported for the projective line: F_p and Q.
pub trait CurveField: Scalar {
    fn is_irreducible(f: &Poly<Self>) -> Result<bool>;
    /// Pairwise coprime squarefree monic polynomials whose roots are exactly the roots of `f`.
    /// Over F_p these are the irreducible factors.
    fn root_groups(f: &Poly<Self>) -> Vec<Poly<Self>>;
    fn fmt_coeff(c: &Self) -> String;
}

impl CurveField for Fp {
    fn is_irreducible(f: &Poly<Self>) -> Result<bool> {
        Ok(is_irreducible_fp(f))
    }
    fn root_groups(f: &Poly<Self>) -> Vec<Poly<Self>> {
        factor_fp(f).into_iter().map(|(q, _)| q).collect()
    }
    fn fmt_coeff(c: &Self) -> String {
        c.value().to_string()
    }
}

impl CurveField for Rational {
    fn is_irreducible(f: &Poly<Self>) -> Result<bool> {
        is_irreducible_q(f)
    }
    fn root_groups(f: &Poly<Self>) -> Vec<Poly<Self>> {
        squarefree_q(f).into_iter().map(|(q, _)| q).collect()
    }
    fn fmt_coeff(c: &Self) -> String {
        format_rational(c)
    }
}

/// Closed point of P^1 over the base field.
#[derive(Clone, PartialEq)]
pub enum CurvePlace<K: Scalar> {
    /// Zero locus of a monic irreducible polynomial, which is also the uniformizer.
    Finite(Poly<K>),
    /// The point at infinity, uniformizer `1/t`.
    Infinity,
}

impl<K: CurveField> CurvePlace<K> {
    /// Validated finite place.
    pub fn finite(poly: Poly<K>) -> Result<Self> {
        if poly.degree().unwrap_or(0) == 0 {
            return Err(Error::invalid("a place needs a polynomial of positive degree"));
        }
        if !poly.is_monic() {
            return Err(Error::invalid(format!("place polynomial {} is not monic", render_poly(&poly))));
        }
        if !K::is_irreducible(&poly)? {
            return Err(Error::NotIrreducible(render_poly(&poly)));
        }
        Ok(CurvePlace::Finite(poly))
    }

    /// The rational point `t = a`.
    pub fn point(a: &K) -> Self {
        CurvePlace::Finite(Poly::linear_root(a))
    }

    pub fn degree(&self) -> usize {
        match self {
            CurvePlace::Finite(p) => p.degree().unwrap(),
            CurvePlace::Infinity => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CurvePlace::Finite(p) => format!("({})", render_poly(p)),
            CurvePlace::Infinity => "inf".into(),
        }
    }
}

pub fn render_poly<K: CurveField>(p: &Poly<K>) -> String {
    p.render("t", K::fmt_coeff)
}

impl<K: CurveField> fmt::Debug for CurvePlace<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Finite formal sum of places.
#[derive(Clone, PartialEq)]
pub struct CurveDivisor<K: Scalar> {
    terms: Vec<(CurvePlace<K>, i64)>,
}

impl<K: CurveField> CurveDivisor<K> {
    pub fn zero() -> Self {
        CurveDivisor { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<(CurvePlace<K>, i64)>) -> Self {
        let mut d = Self::zero();
        for (p, n) in terms {
            d.add_term(p, n);
        }
        d
    }

    /// `n * inf`.
    pub fn at_infinity(n: i64) -> Self {
        Self::from_terms(vec![(CurvePlace::Infinity, n)])
    }

    /// The canonical divisor of P^1, `div(dt) = -2 inf`.
    pub fn canonical() -> Self {
        Self::at_infinity(-2)
    }

    pub fn add_term(&mut self, place: CurvePlace<K>, n: i64) {
        if let Some(e) = self.terms.iter_mut().find(|(q, _)| *q == place) {
            e.1 += n;
        } else {
            self.terms.push((place, n));
        }
        self.terms.retain(|(_, m)| *m != 0);
    }

    pub fn terms(&self) -> &[(CurvePlace<K>, i64)] {
        &self.terms
    }

    pub fn mult(&self, place: &CurvePlace<K>) -> i64 {
        self.terms.iter().find(|(q, _)| q == place).map_or(0, |(_, n)| *n)
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, n)| n * p.degree() as i64).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut d = self.clone();
        for (p, n) in &o.terms {
            d.add_term(p.clone(), *n);
        }
        d
    }

    pub fn neg(&self) -> Self {
        CurveDivisor { terms: self.terms.iter().map(|(p, n)| (p.clone(), -n)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn finite_terms(&self) -> impl Iterator<Item = (&Poly<K>, i64)> {
        self.terms.iter().filter_map(|(p, n)| match p {
            CurvePlace::Finite(q) => Some((q, *n)),
            CurvePlace::Infinity => None,
        })
    }

    pub fn label(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(p, n)| format!("{n}*{}", p.label()))
            .collect::<Vec<_>>()
            .join(" + ")
            .replace("+ -", "- ")
    }
}

impl<K: CurveField> fmt::Debug for CurveDivisor<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn place_validation() {
        let p = Poly::new(Fp::zero(2), vec![Fp::zero(2), Fp::zero(2), Fp::one(2)]);
        assert!(matches!(CurvePlace::finite(p), Err(Error::NotIrreducible(_))));
        let q = Poly::new(Fp::zero(2), vec![Fp::one(2), Fp::one(2), Fp::one(2)]);
        assert_eq!(CurvePlace::finite(q).unwrap().degree(), 2);
    }

    #[test]
    fn divisor_degree() {
        let t = CurvePlace::point(&Fp::zero(5));
        let d = CurveDivisor::from_terms(vec![(CurvePlace::Infinity, 3), (t.clone(), -1), (t, 0)]);
        assert_eq!(d.degree(), 2);
        assert_eq!(d.terms().len(), 2);
    }
}
