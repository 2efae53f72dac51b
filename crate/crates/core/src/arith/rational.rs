use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exponent of `p` in a nonzero integer; `None` for zero.
pub fn ord_p_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(k);
        }
        m = q;
        k += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn ord_p(r: &Rational, p: u64) -> Option<i64> {
    Some(ord_p_int(r.numer(), p)? - ord_p_int(r.denom(), p)?)
}

/// Representative of r mod 1 in [0, 1).
pub fn frac_mod1(r: &Rational) -> Rational {
    r - r.floor()
}

/// Parses `a`, `a/b`, or a decimal literal such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::from_integer(w.abs()) + Rational::new(f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text `n` or `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization of |n| by trial division (n nonzero).
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Primes dividing a nonzero big integer, found by trial division up to `bound`.
/// Returns the primes found and whether the remaining cofactor is 1.
pub fn small_prime_support(n: &BigInt, bound: u64) -> (Vec<u64>, bool) {
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= bound && !m.is_one() {
        let db = BigInt::from(d);
        if (&m % &db).is_zero() {
            out.push(d);
            while (&m % &db).is_zero() {
                m /= &db;
            }
        }
        d += 1;
    }
    (out, m.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(rat(1, 2) + rat(1, 3), rat(5, 6));
        assert_eq!(rat(7, 7), int(1));
        assert_eq!(rat(2, 3) * rat(9, 4), rat(3, 2));
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
    }

    #[test]
    fn valuations() {
        assert_eq!(ord_p(&rat(1, 6), 2), Some(-1));
        assert_eq!(ord_p(&rat(4, 1), 2), Some(2));
        assert_eq!(ord_p(&int(0), 2), None);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn fractional_part_is_in_unit_interval() {
        assert_eq!(frac_mod1(&rat(-1, 3)), rat(2, 3));
        assert_eq!(frac_mod1(&int(-2)), int(0));
    }
}
