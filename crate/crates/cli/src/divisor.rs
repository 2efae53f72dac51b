//! Divisors written as signed sums `n*place`, e.g. `3*inf - 1*(t) + 2*(t^2+1)`,
//! `1*V2 + 3*Einf`, or `1*(2) - 1*(5) + 0.5*inf`.

use adelix_core::arith::fp::Fp;
use adelix_core::arith::poly::Poly;
use adelix_core::arith::rational::{is_prime, parse_rational, Rational};
use adelix_core::arith_curve::ArithDivisor;
use adelix_core::curve::{CurveDivisor, CurvePlace};
use adelix_core::surface::{SurfaceCurve, SurfaceDivisor};
use adelix_core::arith::scalar::Scalar;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::expr::{parse_poly, ExprError, ParseError};

#[derive(Clone, Debug, PartialEq)]
pub enum Place {
    /// `(expr)`: a polynomial place on a curve, or a prime on Spec Z.
    Paren(String),
    Inf,
    Vertical(u64),
    Horizontal(Rational),
    HorizontalInf,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Int(i64),
    Real(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisorSpec {
    /// Each term with the byte offset of its place token.
    pub terms: Vec<(Coeff, Place, usize)>,
}

#[derive(Debug, thiserror::Error)]
pub enum DivisorError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("{message} at byte {offset}")]
    Place { offset: usize, message: String },
    #[error("polynomial place: {0}")]
    Poly(#[from] ExprError),
    #[error(transparent)]
    Core(#[from] adelix_core::Error),
}

fn syntax<T>(offset: usize, message: impl Into<String>) -> Result<T, DivisorError> {
    Err(ParseError { offset, message: message.into() }.into())
}

fn place_err<T>(offset: usize, message: impl Into<String>) -> Result<T, DivisorError> {
    Err(DivisorError::Place { offset, message: message.into() })
}

pub fn parse_divisor(src: &str) -> Result<DivisorSpec, DivisorError> {
    let b = src.as_bytes();
    let mut i = 0;
    let skip = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let mut terms = Vec::new();
    skip(&mut i);
    if i == b.len() || src[i..].trim() == "0" {
        return Ok(DivisorSpec { terms });
    }
    loop {
        skip(&mut i);
        let mut sign = 1.0;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            if b[i] == b'-' {
                sign = -1.0;
            }
            i += 1;
            skip(&mut i);
        } else if !terms.is_empty() {
            return syntax(i, "expected '+' or '-'");
        }
        let start = i;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
            i += 1;
        }
        let coeff = if i == start {
            Coeff::Int(sign as i64)
        } else {
            let s = &src[start..i];
            let c = if s.contains('.') {
                Coeff::Real(sign * s.parse::<f64>().or_else(|_| syntax(start, format!("bad coefficient '{s}'")))?)
            } else {
                let n: i64 = s.parse().or_else(|_| syntax(start, format!("bad coefficient '{s}'")))?;
                Coeff::Int(sign as i64 * n)
            };
            skip(&mut i);
            if i >= b.len() || b[i] != b'*' {
                return syntax(i, "expected '*' after the coefficient");
            }
            i += 1;
            skip(&mut i);
            c
        };
        let at = i;
        let place = if i < b.len() && b[i] == b'(' {
            let mut depth = 0;
            let mut j = i;
            while j < b.len() {
                match b[j] {
                    b'(' => depth += 1,
                    b')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            if j == b.len() {
                return syntax(j, "expected ')'");
            }
            let inner = src[i + 1..j].to_string();
            i = j + 1;
            Place::Paren(inner)
        } else {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'/' || b[i] == b'_') {
                i += 1;
            }
            // E-1/2: a sign right after E belongs to the point.
            if i == s + 1 && b[s] == b'E' && i < b.len() && b[i] == b'-' {
                i += 1;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'/') {
                    i += 1;
                }
            }
            place_token(&src[s..i], s)?
        };
        terms.push((coeff, place, at));
        skip(&mut i);
        if i == b.len() {
            return Ok(DivisorSpec { terms });
        }
    }
}

fn place_token(tok: &str, at: usize) -> Result<Place, DivisorError> {
    match tok {
        "" => syntax(at, "expected a place"),
        "inf" => Ok(Place::Inf),
        "Einf" => Ok(Place::HorizontalInf),
        _ => {
            if let Some(p) = tok.strip_prefix('V') {
                let p: u64 = p.parse().or_else(|_| place_err(at, format!("bad prime in '{tok}'")))?;
                if !is_prime(p) {
                    return place_err(at, format!("{p} is not prime"));
                }
                Ok(Place::Vertical(p))
            } else if let Some(a) = tok.strip_prefix('E') {
                let a = parse_rational(a).or_else(|_| place_err(at, format!("bad rational point in '{tok}'")))?;
                Ok(Place::Horizontal(a))
            } else {
                place_err(at, format!("unknown place token '{tok}'"))
            }
        }
    }
}

fn int_coeff(c: &Coeff, at: usize) -> Result<i64, DivisorError> {
    match c {
        Coeff::Int(n) => Ok(*n),
        Coeff::Real(_) => place_err(at, "real coefficients are only allowed at the infinite place of Spec Z"),
    }
}

/// Reduces a rational polynomial mod p, requiring p-integral coefficients.
pub fn poly_mod_p(f: &Poly<Rational>, p: u64) -> Option<Poly<Fp>> {
    let pb = BigInt::from(p);
    let residue = |x: &BigInt| ((x % &pb) + &pb) % &pb;
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| {
            let (n, d) = (residue(c.numer()), residue(c.denom()));
            Fp::new(p, n.to_i64()?).divided(&Fp::new(p, d.to_i64()?)).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Poly::new(Fp::zero(p), coeffs))
}

impl DivisorSpec {
    /// A divisor on P^1 over F_p; parenthesized places must be monic irreducible mod p.
    pub fn to_curve(&self, p: u64) -> Result<CurveDivisor<Fp>, DivisorError> {
        let mut d = CurveDivisor::zero();
        for (c, place, at) in &self.terms {
            let n = int_coeff(c, *at)?;
            let pl = match place {
                Place::Inf => CurvePlace::Infinity,
                Place::Paren(src) => {
                    let f = parse_poly(src)?;
                    let Some(g) = poly_mod_p(&f, p) else {
                        return place_err(*at, format!("({src}) has a coefficient that is not {p}-integral"));
                    };
                    CurvePlace::finite(g)?
                }
                _ => return place_err(*at, "curve divisors use (poly) and inf"),
            };
            d.add_term(pl, n);
        }
        Ok(d)
    }

    pub fn to_surface(&self) -> Result<SurfaceDivisor, DivisorError> {
        let mut d = SurfaceDivisor::zero();
        for (c, place, at) in &self.terms {
            let n = int_coeff(c, *at)?;
            let curve = match place {
                Place::Vertical(p) => SurfaceCurve::Vertical(*p),
                Place::Horizontal(a) => SurfaceCurve::horizontal(a.clone()),
                Place::HorizontalInf => SurfaceCurve::horizontal_at_infinity(),
                _ => return place_err(*at, "surface divisors use V<p>, E<a> and Einf"),
            };
            d.add_term(curve, n);
        }
        Ok(d)
    }

    /// A divisor on Spec Z: `n*(p)` at primes and a real multiple of `inf`.
    pub fn to_arith(&self) -> Result<ArithDivisor, DivisorError> {
        let mut d = ArithDivisor::default();
        for (c, place, at) in &self.terms {
            match place {
                Place::Inf => {
                    let r = match c {
                        Coeff::Int(n) => *n as f64,
                        Coeff::Real(x) => *x,
                    };
                    d.add_real(r)?;
                }
                Place::Paren(src) => {
                    let q = parse_rational(src.trim()).ok().filter(|q| q.is_integer() && *q > Rational::one());
                    let Some(p) = q.and_then(|q| q.to_integer().to_u64()) else {
                        return place_err(*at, format!("({src}) is not a prime"));
                    };
                    d.add_prime(p, int_coeff(c, *at)?)?;
                }
                _ => return place_err(*at, "arithmetic divisors use (p) and inf"),
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use adelix_core::arith::rational::{int, rat};

    #[test]
    fn curve_divisors() {
        let d = parse_divisor("3*inf-1*(t)").unwrap().to_curve(5).unwrap();
        assert_eq!(d.degree(), 2);
        let d = parse_divisor("3*inf - 1*(t) + 2*(t^2+1)").unwrap().to_curve(3).unwrap();
        assert_eq!(d.degree(), 6);
        let e = parse_divisor("2*(t^2+2)").unwrap().to_curve(2).unwrap_err();
        assert!(matches!(e, DivisorError::Core(adelix_core::Error::NotIrreducible(_))), "{e}");
    }

    #[test]
    fn surface_divisors() {
        let d = parse_divisor("1*V2+3*Einf").unwrap().to_surface().unwrap();
        assert_eq!(d.vertical_part(), SurfaceDivisor::from_terms([(SurfaceCurve::Vertical(2), 1)]));
        assert_eq!(d.horizontal_part().mult(&SurfaceCurve::horizontal_at_infinity()), 3);
        let d = parse_divisor("-2*E-1/2 + E3").unwrap().to_surface().unwrap();
        assert_eq!(d.mult(&SurfaceCurve::horizontal(rat(-1, 2))), -2);
        assert_eq!(d.mult(&SurfaceCurve::horizontal(int(3))), 1);
        assert!(parse_divisor("1*V4").is_err());
        assert!(parse_divisor("1*W2").is_err());
    }

    #[test]
    fn arithmetic_divisors() {
        let d = parse_divisor("1*(2)-1*(5)+0.5*inf").unwrap().to_arith().unwrap();
        assert_eq!(d.mult(2), 1);
        assert_eq!(d.mult(5), -1);
        assert_eq!(d.real(), 0.5);
        assert!(parse_divisor("1*(6)").unwrap().to_arith().is_err());
    }

    #[test]
    fn syntax_errors() {
        let e = parse_divisor("3*inf 2*(t)").unwrap_err();
        assert!(matches!(e, DivisorError::Syntax(ParseError { offset: 6, .. })), "{e}");
        assert!(matches!(parse_divisor("3 inf").unwrap_err(), DivisorError::Syntax(_)));
    }
}
