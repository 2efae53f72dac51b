use std::fmt;

use num_traits::Zero;

use crate::arith::fp::Fp;
use crate::arith::padic::PAdic;
use crate::arith::rational::{frac_mod1, Rational};
use crate::arith::scalar::rational_to_f64;
use crate::error::Result;

/// A point of R/Z, exact when every contribution came from a finite place.
#[derive(Clone, PartialEq)]
pub enum CircleValue {
    /// Representative in [0, 1).
    Exact(Rational),
    /// Representative in [0, 1) with an absolute error bound.
    Approx { x: f64, tol: f64 },
}

impl CircleValue {
    pub fn exact(r: Rational) -> Self {
        CircleValue::Exact(frac_mod1(&r))
    }

    pub fn approx(x: f64, tol: f64) -> Self {
        CircleValue::Approx { x: x.rem_euclid(1.0), tol }
    }

    pub fn zero() -> Self {
        CircleValue::Exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CircleValue::Exact(_))
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (CircleValue::Exact(a), CircleValue::Exact(b)) => CircleValue::exact(a + b),
            _ => CircleValue::approx(self.to_f64() + o.to_f64(), self.tol() + o.tol()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            CircleValue::Exact(a) => CircleValue::exact(-a),
            CircleValue::Approx { x, tol } => CircleValue::approx(-x, *tol),
        }
    }

    pub fn sum<'a>(vals: impl IntoIterator<Item = &'a CircleValue>) -> Self {
        vals.into_iter().fold(CircleValue::zero(), |acc, v| acc.add(v))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            CircleValue::Exact(r) => rational_to_f64(r),
            CircleValue::Approx { x, .. } => *x,
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            CircleValue::Exact(_) => 0.0,
            CircleValue::Approx { tol, .. } => *tol,
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_zero(&self) -> f64 {
        let x = self.to_f64().rem_euclid(1.0);
        x.min(1.0 - x)
    }

    /// Exactly zero, or within `tol` of an integer for approximate values.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            CircleValue::Exact(r) => r.is_zero(),
            CircleValue::Approx { .. } => self.dist_to_zero() <= tol,
        }
    }
}

impl fmt::Debug for CircleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CircleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleValue::Exact(r) => write!(f, "{r} mod 1"),
            CircleValue::Approx { x, tol } => write!(f, "{x} mod 1 (+/- {tol:e})"),
        }
    }
}

/// Canonical character of Q_p: the principal part of the expansion, mod 1.
pub fn lambda_p(x: &PAdic) -> Result<CircleValue> {
    Ok(CircleValue::Exact(x.principal_part()?))
}

/// Canonical character of Q_p evaluated on a rational, computed exactly.
pub fn lambda_p_rational(x: &Rational, p: u64) -> CircleValue {
    // the principal part only depends on x modulo Z_p, so a few digits beyond
    // the pole order are always enough
    let digits = 1 + crate::arith::rational::ord_p(x, p).map_or(0, |v| (-v).max(0)) as u32;
    let e = PAdic::from_rational(x, p, digits);
    CircleValue::Exact(e.principal_part().expect("precision covers the pole"))
}

/// Canonical character of the real place: `x -> -x mod 1`.
pub fn lambda_inf(x: f64, tol: f64) -> CircleValue {
    CircleValue::approx(-x, tol)
}

/// The real character evaluated exactly on a rational number.
pub fn lambda_inf_rational(x: &Rational) -> CircleValue {
    CircleValue::exact(-x)
}

/// Character of a complex place: trace to R (twice the real part), then `lambda_inf`.
/// No complex place occurs over Q, so this is never reached by the surface code.
pub fn lambda_complex(re: f64, tol: f64) -> CircleValue {
    lambda_inf(2.0 * re, 2.0 * tol)
}

/// Character of a prime field: `x -> x/p mod 1`.
pub fn lambda_fp(x: &Fp) -> CircleValue {
    CircleValue::exact(Rational::new(x.value().into(), x.p().into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn real_character() {
        assert!((lambda_inf(0.3, 1e-12).to_f64() - 0.7).abs() < 1e-12);
        assert!(lambda_inf(-2.0, 1e-12).is_zero_within(1e-12));
    }

    #[test]
    fn product_formula_for_one_sixth() {
        let x = rat(1, 6);
        let s = [lambda_p_rational(&x, 2), lambda_p_rational(&x, 3), lambda_inf_rational(&x)];
        assert_eq!(s[0], CircleValue::Exact(rat(1, 2)));
        assert_eq!(s[1], CircleValue::Exact(rat(2, 3)));
        assert_eq!(s[2], CircleValue::Exact(rat(5, 6)));
        assert_eq!(CircleValue::sum(&s), CircleValue::zero());
    }

    #[test]
    fn mixing_degrades_to_approximate() {
        let s = CircleValue::exact(rat(1, 2)).add(&lambda_inf(0.5, 1e-12));
        assert!(!s.is_exact());
        assert!(s.is_zero_within(1e-9));
        assert_eq!(CircleValue::exact(int(-3)), CircleValue::zero());
    }
}
