use std::sync::Arc;

use crate::arith::ext::Ext;
use crate::arith::poly::Poly;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::scalar::Scalar;
use crate::curve::place::{CurveField, CurvePlace};
use crate::error::{Error, Result};

/// Digits `r_j` (polynomials of degree `< deg P`, constants at infinity) of the
/// expansion `f = sum_j r_j u^j` in the uniformizer `u` of `place`, for `lo <= j < hi`.
///
/// Fails with `WindowTooSmall` when `f` has a pole of order larger than `-lo`.
pub fn digits_at<K: CurveField>(
    f: &RationalFunction<K>,
    place: &CurvePlace<K>,
    lo: i64,
    hi: i64,
) -> Result<Vec<Poly<K>>> {
    digit_slice(f, place, lo, hi, true)
}

/// Digits for `lo <= j < hi`, ignoring any lower-order terms.
pub fn digit_range<K: CurveField>(
    f: &RationalFunction<K>,
    place: &CurvePlace<K>,
    lo: i64,
    hi: i64,
) -> Result<Vec<Poly<K>>> {
    digit_slice(f, place, lo, hi, false)
}

fn digit_slice<K: CurveField>(
    f: &RationalFunction<K>,
    place: &CurvePlace<K>,
    lo: i64,
    hi: i64,
    strict: bool,
) -> Result<Vec<Poly<K>>> {
    let z = f.proto().clone();
    let n = (hi - lo).max(0) as usize;
    if f.is_zero() {
        return Ok(vec![Poly::zero(&z); n]);
    }
    match place {
        CurvePlace::Infinity => {
            let s = f.at_infinity().laurent_at_zero(hi)?;
            if let Some(v) = s.valuation() {
                if strict && v < lo {
                    return Err(Error::WindowTooSmall { what: "pole order at inf".into(), needed: v });
                }
            }
            (lo..hi).map(|j| Ok(Poly::constant(s.coeff_at(j)?))).collect()
        }
        CurvePlace::Finite(pi) => {
            let k = f.ord_at(pi)?;
            if strict && k < lo {
                return Err(Error::WindowTooSmall { what: format!("pole order at ({pi:?})"), needed: k });
            }
            let mut num = f.num().clone();
            let mut den = f.den().clone();
            for _ in 0..k.max(0) {
                num = num.div_exact(pi)?;
            }
            for _ in 0..(-k).max(0) {
                den = den.div_exact(pi)?;
            }
            // den is a unit at the place; invert it modulo pi once
            let (g, s, _) = den.rem(pi)?.ext_gcd(pi)?;
            debug_assert_eq!(g.degree(), Some(0));
            let mut out = vec![Poly::zero(&z); n];
            let mut j = k;
            while j < hi {
                let r = num.mul(&s).rem(pi)?;
                if j >= lo {
                    out[(j - lo) as usize] = r.clone();
                }
                num = num.sub(&r.mul(&den)).div_exact(pi)?;
                j += 1;
            }
            Ok(out)
        }
    }
}

/// Coefficient of `(t - a)^-1` of `h` at the rational point `a`.
fn residue_at_root<K: Scalar>(h: &RationalFunction<K>, a: &K) -> Result<K> {
    h.laurent_at(a, 0)?.coeff_at(-1)
}

/// Sum of residues of `h dt` over all roots of the squarefree `q`, as an element of K
/// (the trace from `K[x]/(q)`).
pub fn residue_over_roots<K: CurveField>(h: &RationalFunction<K>, q: &Poly<K>) -> Result<K> {
    if q.degree() == Some(1) {
        let a = q.coeff(0).negated().divided(q.leading().unwrap())?;
        return residue_at_root(h, &a);
    }
    let m = Arc::new(q.make_monic()?);
    let theta = Ext::generator(m.clone());
    let lift = |p: &Poly<K>| p.map(&theta, |c| Ext::from_base(m.clone(), c.clone()));
    let hn = lift(h.num());
    let hd = lift(h.den());
    // Taylor shift to the generic root, then expand
    let n = crate::arith::laurent::LaurentSeries::from_poly(&hn.taylor_shift(&theta));
    let d = crate::arith::laurent::LaurentSeries::from_poly(&hd.taylor_shift(&theta));
    let r = n.div_to(&d, 0)?.coeff_at(-1)?;
    Ok(r.trace())
}

/// Residue of `h dt` at `place`, traced down to the base field.
pub fn residue_of_form<K: CurveField>(h: &RationalFunction<K>, place: &CurvePlace<K>) -> Result<K> {
    if h.is_zero() {
        return Ok(h.proto().zero_like());
    }
    match place {
        CurvePlace::Infinity => h.form_at_infinity().laurent_at_zero(0)?.coeff_at(-1),
        CurvePlace::Finite(pi) => residue_over_roots(h, pi),
    }
}

/// `Res_P(f w dt)`: the curve residue of `f * (w dt)` at `P`.
pub fn curve_residue<K: CurveField>(
    f: &RationalFunction<K>,
    w: &RationalFunction<K>,
    place: &CurvePlace<K>,
) -> Result<K> {
    residue_of_form(&f.mul(w), place)
}

/// All nonzero residues of `h dt`, grouped by pole (root groups over Q).
pub fn residues_of_form<K: CurveField>(h: &RationalFunction<K>) -> Result<Vec<(CurvePlace<K>, K)>> {
    let mut out = Vec::new();
    if h.is_zero() {
        return Ok(out);
    }
    for q in K::root_groups(h.den()) {
        let r = residue_over_roots(h, &q)?;
        out.push((CurvePlace::Finite(q), r));
    }
    out.push((CurvePlace::Infinity, residue_of_form(h, &CurvePlace::Infinity)?));
    Ok(out)
}

/// Sum of all residues of `h dt`; zero by the residue theorem.
pub fn residue_theorem_check<K: CurveField>(h: &RationalFunction<K>) -> Result<K> {
    let z = h.proto().zero_like();
    Ok(residues_of_form(h)?.iter().fold(z, |acc, (_, r)| acc.plus(r)))
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
    fn residues_of_dt_over_t() {
        let h = RationalFunction::new(q(&[1]), q(&[0, 1])).unwrap();
        assert_eq!(residue_of_form(&h, &CurvePlace::point(&int(0))).unwrap(), int(1));
        assert_eq!(residue_of_form(&h, &CurvePlace::Infinity).unwrap(), int(-1));
        assert_eq!(residue_theorem_check(&h).unwrap(), int(0));
    }

    #[test]
    fn partial_fractions() {
        let h = RationalFunction::new(q(&[1]), q(&[0, -1, 1])).unwrap();
        assert_eq!(residue_of_form(&h, &CurvePlace::point(&int(0))).unwrap(), int(-1));
        assert_eq!(residue_of_form(&h, &CurvePlace::point(&int(1))).unwrap(), int(1));
        assert_eq!(residue_of_form(&h, &CurvePlace::Infinity).unwrap(), int(0));
    }

    #[test]
    fn degree_two_place_over_f2() {
        // dt/(t^2+t+1) over F_2: the residue at the quadratic place is the trace of 1/(2x+1) = 1/1
        let one = Fp::one(2);
        let pi = Poly::new(Fp::zero(2), vec![one, one, one]);
        let h = RationalFunction::new(Poly::one(&one), pi.clone()).unwrap();
        let r = residue_of_form(&h, &CurvePlace::Finite(pi)).unwrap();
        assert_eq!(r, Fp::zero(2));
        assert_eq!(residue_theorem_check(&h).unwrap(), Fp::zero(2));
    }

    #[test]
    fn digits_of_inverse_at_quadratic_place() {
        let one = Fp::one(3);
        let pi = Poly::new(Fp::zero(3), vec![one, Fp::zero(3), one]); // t^2 + 1
        let f = RationalFunction::new(Poly::monomial(one, 1), pi.clone()).unwrap();
        let d = digits_at(&f, &CurvePlace::Finite(pi.clone()), -1, 2).unwrap();
        // t/(t^2+1): digit at u^-1 is t, higher digits vanish
        assert_eq!(d[0], Poly::monomial(one, 1));
        assert!(d[1].is_zero() && d[2].is_zero());
        assert!(digits_at(&f, &CurvePlace::Finite(pi), 0, 2).is_err());
    }
}
