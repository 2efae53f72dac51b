use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::factor::is_irreducible_fp;
use crate::arith::fp::Fp;
use crate::arith::poly::Poly;
use crate::arith::rational::{format_rational, is_prime, Rational};
use crate::arith::scalar::Scalar;
use crate::curve::{CurveDivisor, CurvePlace};
use crate::error::{Error, Result};

/// A point of P^1(Q).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QPoint {
    Finite(Rational),
    Infinity,
}

impl QPoint {
    pub fn label(&self) -> String {
        match self {
            QPoint::Finite(a) => format_rational(a),
            QPoint::Infinity => "inf".into(),
        }
    }

    /// The point of the fiber over p met by the closure of this point.
    pub fn reduction(&self, p: u64) -> FiberPoint {
        match self {
            QPoint::Infinity => FiberPoint::Infinity,
            QPoint::Finite(a) => {
                let pb = BigInt::from(p);
                if (a.denom() % &pb).is_zero() {
                    return FiberPoint::Infinity;
                }
                let n = a.numer().mod_floor(&pb).to_i64().unwrap();
                let d = a.denom().mod_floor(&pb).to_i64().unwrap();
                let r = Fp::new(p, n).divided(&Fp::new(p, d)).expect("unit mod p");
                FiberPoint::Class(r.value())
            }
        }
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A closed point of the fiber P^1 over F_p.
///
/// Rational points are `Class(a)` for `t = a`; points of degree at least two
/// are given by a monic irreducible polynomial, coefficients from low to high.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiberPoint {
    Class(u64),
    Closed(Vec<u64>),
    Infinity,
}

impl FiberPoint {
    pub fn from_poly(q: &Poly<Fp>) -> Result<Self> {
        let q = q.make_monic()?;
        match q.degree() {
            None | Some(0) => Err(Error::invalid("a fiber point needs a polynomial of positive degree")),
            Some(1) => {
                Ok(FiberPoint::Class(q.coeff(0).negated().value()))
            }
            Some(_) => {
                if !is_irreducible_fp(&q) {
                    return Err(Error::NotIrreducible(format!("{q:?}")));
                }
                Ok(FiberPoint::Closed(q.coeffs().iter().map(|c| c.value()).collect()))
            }
        }
    }

    pub fn from_place(place: &CurvePlace<Fp>) -> Result<Self> {
        match place {
            CurvePlace::Infinity => Ok(FiberPoint::Infinity),
            CurvePlace::Finite(q) => Self::from_poly(q),
        }
    }

    /// The defining monic polynomial over F_p, `None` at infinity.
    pub fn poly(&self, p: u64) -> Option<Poly<Fp>> {
        match self {
            FiberPoint::Infinity => None,
            FiberPoint::Class(a) => Some(Poly::linear_root(&Fp::new(p, *a as i64))),
            FiberPoint::Closed(c) => Some(Poly::new(Fp::zero(p), c.iter().map(|&x| Fp::new(p, x as i64)).collect())),
        }
    }

    pub fn place(&self, p: u64) -> CurvePlace<Fp> {
        match self.poly(p) {
            None => CurvePlace::Infinity,
            Some(q) => CurvePlace::Finite(q),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            FiberPoint::Closed(c) => c.len() - 1,
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            FiberPoint::Class(a) => format!("t={a}"),
            FiberPoint::Infinity => "t=inf".into(),
            FiberPoint::Closed(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &x)| x != 0)
                    .map(|(k, &x)| match (k, x) {
                        (0, _) => x.to_string(),
                        (1, 1) => "t".into(),
                        (1, _) => format!("{x}*t"),
                        (_, 1) => format!("t^{k}"),
                        _ => format!("{x}*t^{k}"),
                    })
                    .collect();
                terms.join("+")
            }
        }
    }

    fn validate(&self, p: u64) -> Result<()> {
        match self {
            FiberPoint::Class(a) if *a >= p => Err(Error::invalid(format!("residue class {a} is not reduced mod {p}"))),
            FiberPoint::Closed(c) => {
                if c.iter().any(|&x| x >= p) || c.last() != Some(&1) {
                    return Err(Error::invalid("closed fiber point must be monic with reduced coefficients"));
                }
                Self::from_poly(&self.poly(p).unwrap()).map(|_| ())
            }
            _ => Ok(()),
        }
    }
}

/// An irreducible curve on P^1 over Z: a prime fiber or the closure of a rational point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SurfaceCurve {
    Vertical(u64),
    Horizontal(QPoint),
}

impl SurfaceCurve {
    pub fn vertical(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(SurfaceCurve::Vertical(p))
    }

    pub fn horizontal(a: Rational) -> Self {
        SurfaceCurve::Horizontal(QPoint::Finite(a))
    }

    pub fn horizontal_at_infinity() -> Self {
        SurfaceCurve::Horizontal(QPoint::Infinity)
    }

    pub fn contains(&self, p: u64, x: &FiberPoint) -> bool {
        match self {
            SurfaceCurve::Vertical(q) => *q == p,
            SurfaceCurve::Horizontal(a) => a.reduction(p) == *x,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SurfaceCurve::Vertical(p) => format!("V{p}"),
            SurfaceCurve::Horizontal(QPoint::Infinity) => "Einf".into(),
            SurfaceCurve::Horizontal(QPoint::Finite(a)) => format!("E{}", format_rational(a)),
        }
    }
}

impl fmt::Display for SurfaceCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A flag (X, C, x) with x a closed point of the fiber over p lying on C.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceFlag {
    curve: SurfaceCurve,
    p: u64,
    point: FiberPoint,
}

impl SurfaceFlag {
    pub fn vertical(p: u64, point: FiberPoint) -> Result<Self> {
        let curve = SurfaceCurve::vertical(p)?;
        point.validate(p)?;
        Ok(SurfaceFlag { curve, p, point })
    }

    pub fn horizontal(a: QPoint, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let point = a.reduction(p);
        Ok(SurfaceFlag { curve: SurfaceCurve::Horizontal(a), p, point })
    }

    pub fn new(curve: SurfaceCurve, p: u64, point: FiberPoint) -> Result<Self> {
        let flag = match &curve {
            SurfaceCurve::Vertical(q) => {
                if *q != p {
                    return Err(Error::invalid(format!("V{q} has no points over {p}")));
                }
                Self::vertical(p, point.clone())?
            }
            SurfaceCurve::Horizontal(a) => Self::horizontal(a.clone(), p)?,
        };
        if flag.point != point {
            return Err(Error::invalid(format!("{} does not pass through {} over {p}", curve, point.label())));
        }
        Ok(flag)
    }

    pub fn curve(&self) -> &SurfaceCurve {
        &self.curve
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn point(&self) -> &FiberPoint {
        &self.point
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self.curve, SurfaceCurve::Vertical(_))
    }

    /// The local parameters (a local equation of the curve, a parameter along it).
    pub fn parameters(&self) -> (String, String) {
        match (&self.curve, &self.point) {
            (SurfaceCurve::Vertical(p), FiberPoint::Class(a)) => (p.to_string(), format!("t-{a}")),
            (SurfaceCurve::Vertical(p), FiberPoint::Infinity) => (p.to_string(), "1/t".into()),
            (SurfaceCurve::Vertical(p), x) => (p.to_string(), format!("{}~", x.label())),
            (SurfaceCurve::Horizontal(QPoint::Finite(a)), _) => (format!("t-{}", format_rational(a)), self.p.to_string()),
            (SurfaceCurve::Horizontal(QPoint::Infinity), _) => ("1/t".into(), self.p.to_string()),
        }
    }

    pub fn label(&self) -> String {
        format!("({}, {} mod {})", self.curve, self.point.label(), self.p)
    }
}

impl fmt::Display for SurfaceFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A Weil divisor on P^1 over Z built from prime fibers and closures of rational points.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SurfaceDivisor {
    terms: BTreeMap<SurfaceCurve, i64>,
}

impl SurfaceDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SurfaceCurve, i64)>) -> Self {
        let mut d = Self::zero();
        for (c, n) in terms {
            d.add_term(c, n);
        }
        d
    }

    /// The divisor of dt: a double pole along the closure of infinity.
    pub fn canonical() -> Self {
        Self::from_terms([(SurfaceCurve::horizontal_at_infinity(), -2)])
    }

    pub fn add_term(&mut self, c: SurfaceCurve, n: i64) {
        let e = self.terms.entry(c.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&c);
        }
    }

    pub fn mult(&self, c: &SurfaceCurve) -> i64 {
        self.terms.get(c).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SurfaceCurve, i64)> {
        self.terms.iter().map(|(c, &n)| (c, n))
    }

    pub fn vertical_part(&self) -> Self {
        Self::from_terms(self.terms().filter(|(c, _)| matches!(c, SurfaceCurve::Vertical(_))).map(|(c, n)| (c.clone(), n)))
    }

    pub fn horizontal_part(&self) -> Self {
        Self::from_terms(self.terms().filter(|(c, _)| matches!(c, SurfaceCurve::Horizontal(_))).map(|(c, n)| (c.clone(), n)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut d = self.clone();
        for (c, n) in o.terms() {
            d.add_term(c.clone(), n);
        }
        d
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.terms().map(|(c, n)| (c.clone(), -n)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Restriction to the fiber over p, a divisor on P^1 over F_p.
    ///
    /// Fibers meet each other trivially, so only the horizontal part contributes.
    pub fn restrict_to_fiber(&self, p: u64) -> CurveDivisor<Fp> {
        let mut out = CurveDivisor::zero();
        for (c, n) in self.terms() {
            if let SurfaceCurve::Horizontal(a) = c {
                out.add_term(a.reduction(p).place(p), n);
            }
        }
        out
    }

    pub fn label(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms()
            .map(|(c, n)| format!("{n}*{c}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for SurfaceDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn reductions() {
        assert_eq!(QPoint::Finite(rat(1, 2)).reduction(3), FiberPoint::Class(2));
        assert_eq!(QPoint::Finite(rat(1, 2)).reduction(2), FiberPoint::Infinity);
        assert_eq!(QPoint::Finite(int(-1)).reduction(5), FiberPoint::Class(4));
    }

    #[test]
    fn flags_validate() {
        assert!(SurfaceFlag::new(SurfaceCurve::horizontal(int(2)), 2, FiberPoint::Class(0)).is_ok());
        assert!(SurfaceFlag::new(SurfaceCurve::horizontal(int(1)), 2, FiberPoint::Class(0)).is_err());
        assert!(SurfaceFlag::vertical(2, FiberPoint::Closed(vec![1, 0, 1])).is_err());
        assert!(SurfaceFlag::vertical(2, FiberPoint::Closed(vec![1, 1, 1])).is_ok());
        assert!(SurfaceFlag::vertical(4, FiberPoint::Class(0)).is_err());
    }

    #[test]
    fn restriction_degree() {
        let d = SurfaceDivisor::from_terms([
            (SurfaceCurve::Vertical(2), 1),
            (SurfaceCurve::horizontal_at_infinity(), 3),
            (SurfaceCurve::horizontal(rat(1, 2)), -1),
        ]);
        let r = d.restrict_to_fiber(2);
        assert_eq!(r.degree(), 2);
        assert_eq!(r.mult(&CurvePlace::Infinity), 2);
    }
}
