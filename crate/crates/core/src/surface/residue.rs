//! Residue theorems on P^1 over Z: around a closed point of a fiber, along a
//! prime fiber, and along the closure of a rational point (with its real place).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::factor::{factor_fp, primitive_integer, rational_roots};
use crate::arith::fp::Fp;
use crate::arith::poly::Poly;
use crate::arith::rational::{ord_p, Rational};
use crate::ctx::PrecisionCtx;
use crate::error::{Error, Result};
use crate::local2d::{res_flag, CircleValue};

use super::expand::{
    arch_residue, expand_form_at_flag, flag_residue, prime_divisors, rational_residue, QFunction, RationalForm,
};
use super::geometry::{FiberPoint, QPoint, SurfaceCurve, SurfaceFlag};
use super::zq::content_split;

/// The terms of a residue sum and their total in R/Z.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueSum {
    pub terms: Vec<(String, CircleValue)>,
    pub total: CircleValue,
}

impl ResidueSum {
    fn from_terms(terms: Vec<(String, CircleValue)>) -> Self {
        let total = CircleValue::sum(terms.iter().map(|(_, v)| v));
        ResidueSum { terms, total }
    }

    pub fn vanishes(&self, tol: f64) -> bool {
        self.total.is_zero_within(tol)
    }
}

/// Where a form has poles: rational points of the generic fiber, and the
/// product of the remaining (non-rational) irreducible factors of the denominator.
pub(crate) struct Poles {
    pub rational: Vec<QPoint>,
    pub irrational: Option<Poly<Rational>>,
}

pub(crate) fn poles(omega: &RationalForm) -> Result<Poles> {
    pole_set(omega.coeff(), true)
}

/// Poles of a function (`as_form = false`) or of the form f dt (`as_form = true`);
/// they differ only at infinity.
pub(crate) fn pole_set(f: &QFunction, as_form: bool) -> Result<Poles> {
    let mut rational = Vec::new();
    let mut irrational = None;
    if f.is_zero() {
        return Ok(Poles { rational, irrational });
    }
    let den = f.den().clone();
    let mut rest = den.clone();
    if den.degree().unwrap_or(0) > 0 {
        for r in rational_roots(&den)? {
            let lin = Poly::linear_root(&r);
            while rest.degree().unwrap_or(0) > 0 && rest.rem(&lin)?.is_zero() {
                rest = rest.div_exact(&lin)?;
            }
            rational.push(QPoint::Finite(r));
        }
        if rest.degree().unwrap_or(0) > 0 {
            irrational = Some(rest);
        }
    }
    let at_inf = if as_form { f.form_at_infinity() } else { f.at_infinity() };
    if at_inf.den().coeff(0).is_zero() {
        rational.push(QPoint::Infinity);
    }
    Ok(Poles { rational, irrational })
}

fn reduce_ints(v: &[BigInt], p: u64) -> Poly<Fp> {
    let pb = BigInt::from(p);
    Poly::new(Fp::zero(p), v.iter().map(|c| Fp::new(p, c.mod_floor(&pb).to_i64().unwrap())).collect())
}

/// Does the closure of the zero set of the (non-rational) polynomial l meet x?
pub(crate) fn meets(l: &Poly<Rational>, p: u64, x: &FiberPoint) -> Result<bool> {
    let ints = primitive_integer(l);
    let red = reduce_ints(&ints, p);
    match x.poly(p) {
        None => Ok(red.degree() < l.degree()),
        Some(q) => Ok(red.rem(&q)?.is_zero()),
    }
}

/// The primes p along whose fibers f has a pole (negative Gauss valuation).
pub(crate) fn polar_primes(f: &QFunction) -> Result<Vec<u64>> {
    if f.is_zero() {
        return Ok(Vec::new());
    }
    let (c, _, _) = content_split(f);
    prime_divisors(c.denom())
}

fn ensure_rational_poles(omega: &RationalForm, where_: &str) -> Result<Poles> {
    let ps = poles(omega)?;
    if let Some(l) = &ps.irrational {
        return Err(Error::Unsupported(format!(
            "{omega} has poles at non-rational points ({l:?}); {where_} would involve horizontal curves over a number field"
        )));
    }
    Ok(ps)
}

/// Σ_{C ∋ x} Res_{C,x}(f ω) for x a closed point of the fiber over p.
pub fn morrow_point_check(
    f: &QFunction,
    omega: &RationalForm,
    p: u64,
    x: &FiberPoint,
    ctx: &PrecisionCtx,
) -> Result<ResidueSum> {
    let form = omega.times(f);
    let vflag = SurfaceFlag::vertical(p, x.clone())?;
    let mut terms = vec![(vflag.label(), residue_at(&form, &vflag, ctx)?)];
    let ps = poles(&form)?;
    if let Some(l) = &ps.irrational {
        if meets(l, p, x)? {
            return Err(Error::Unsupported(format!(
                "a pole of {form} along a non-rational horizontal curve passes through {} over {p}",
                x.label()
            )));
        }
    }
    for a in ps.rational.iter().filter(|a| a.reduction(p) == *x) {
        let flag = SurfaceFlag::horizontal(a.clone(), p)?;
        terms.push((flag.label(), residue_at(&form, &flag, ctx)?));
    }
    Ok(ResidueSum::from_terms(terms))
}

/// Σ_{x ∈ V_p} Res_{V_p,x}(f ω), points of every degree included through traces.
pub fn morrow_vertical_check(f: &QFunction, omega: &RationalForm, p: u64, ctx: &PrecisionCtx) -> Result<ResidueSum> {
    let form = omega.times(f);
    let mut terms = Vec::new();
    for x in vertical_support(&form, p)? {
        let flag = SurfaceFlag::vertical(p, x)?;
        terms.push((flag.label(), residue_at(&form, &flag, ctx)?));
    }
    Ok(ResidueSum::from_terms(terms))
}

/// Σ_p Res_{E_a,p}(f ω) + Res_{a,∞}(f ω).
pub fn morrow_horizontal_check(f: &QFunction, omega: &RationalForm, a: &QPoint, ctx: &PrecisionCtx) -> Result<ResidueSum> {
    let form = omega.times(f);
    let r = rational_residue(&form, a)?;
    let mut terms = Vec::new();
    if !r.is_zero() {
        for p in prime_divisors(r.denom())? {
            let flag = SurfaceFlag::horizontal(a.clone(), p)?;
            terms.push((flag.label(), residue_at(&form, &flag, ctx)?));
        }
    }
    terms.push((format!("({}, inf)", SurfaceCurve::Horizontal(a.clone())), arch_residue(&form, a, ctx.arch_tol)?));
    Ok(ResidueSum::from_terms(terms))
}

/// Residue at a flag, through the expansion where one exists.
fn residue_at(form: &RationalForm, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<CircleValue> {
    if flag.point().degree() > 1 {
        return flag_residue(form, flag);
    }
    res_flag(&expand_form_at_flag(form, flag, ctx)?, ctx.arch_tol)
}

/// The points of V_p where the form can have a nonzero residue: the zeros of
/// the reduced denominator, and infinity.
fn vertical_support(form: &RationalForm, p: u64) -> Result<Vec<FiberPoint>> {
    let mut pts = BTreeSet::new();
    if form.is_zero() {
        return Ok(Vec::new());
    }
    let (_, _, d0) = content_split(form.coeff());
    let dbar = reduce_ints(&d0, p);
    if dbar.degree().unwrap_or(0) > 0 {
        for (q, _) in factor_fp(&dbar) {
            pts.insert(FiberPoint::from_poly(&q)?);
        }
    }
    pts.insert(FiberPoint::Infinity);
    Ok(pts.into_iter().collect())
}

/// Σ of Res over every flag on V_p (fast path; no expansions).
pub(crate) fn vertical_sum(form: &RationalForm, p: u64) -> Result<CircleValue> {
    if form.is_zero() || ord_p(&content_split(form.coeff()).0, p).unwrap() >= 0 {
        return Ok(CircleValue::zero());
    }
    let mut acc = CircleValue::zero();
    for x in vertical_support(form, p)? {
        acc = acc.add(&flag_residue(form, &SurfaceFlag::vertical(p, x)?)?);
    }
    Ok(acc)
}

/// Σ of Res over the finite flags on E_a.
pub(crate) fn horizontal_finite_sum(form: &RationalForm, a: &QPoint) -> Result<CircleValue> {
    let r = rational_residue(form, a)?;
    if r.is_zero() {
        return Ok(CircleValue::zero());
    }
    let mut acc = CircleValue::zero();
    for p in prime_divisors(r.denom())? {
        acc = acc.add(&crate::local2d::lambda_p_rational(&r, p));
    }
    Ok(acc)
}

/// Σ of Res over every flag through x.
pub(crate) fn point_sum(form: &RationalForm, p: u64, x: &FiberPoint) -> Result<CircleValue> {
    let mut acc = flag_residue(form, &SurfaceFlag::vertical(p, x.clone())?)?;
    let ps = poles(form)?;
    if let Some(l) = &ps.irrational {
        if meets(l, p, x)? {
            return Err(Error::Unsupported(format!("non-rational horizontal poles of {form} pass through {}", x.label())));
        }
    }
    for a in ps.rational.iter().filter(|a| a.reduction(p) == *x) {
        acc = acc.add(&flag_residue(form, &SurfaceFlag::horizontal(a.clone(), p)?)?);
    }
    Ok(acc)
}

/// Σ of Res over all finite flags and all archimedean pairs.
pub(crate) fn total_sum(form: &RationalForm, tol: f64) -> Result<CircleValue> {
    let ps = ensure_rational_poles(form, "the global residue sum")?;
    let mut acc = CircleValue::zero();
    for p in polar_primes(form.coeff())? {
        acc = acc.add(&vertical_sum(form, p)?);
    }
    for a in &ps.rational {
        acc = acc.add(&horizontal_finite_sum(form, a)?).add(&arch_residue(form, a, tol)?);
    }
    Ok(acc)
}

/// Σ of Res over all archimedean pairs.
pub(crate) fn arch_sum(form: &RationalForm, tol: f64) -> Result<CircleValue> {
    let ps = ensure_rational_poles(form, "the archimedean residue sum")?;
    let mut acc = CircleValue::zero();
    for a in &ps.rational {
        acc = acc.add(&arch_residue(form, a, tol)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratfunc::RationalFunction;
    use crate::arith::rational::{int, rat};

    fn rf(num: &[i64], den: &[i64]) -> QFunction {
        let z = Rational::zero();
        let poly = |c: &[i64]| Poly::new(z.clone(), c.iter().map(|&x| int(x)).collect());
        RationalFunction::new(poly(num), poly(den)).unwrap()
    }

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(16, -24, 8, 1e-10).unwrap()
    }

    #[test]
    fn point_check_dt_over_2t() {
        let one = rf(&[1], &[1]);
        let omega = RationalForm::new(rf(&[1], &[0, 2]));
        let s = morrow_point_check(&one, &omega, 2, &FiberPoint::Class(0), &ctx()).unwrap();
        assert_eq!(s.terms.len(), 2);
        assert!(s.terms.iter().all(|(_, v)| *v == CircleValue::exact(rat(1, 2))));
        assert_eq!(s.total, CircleValue::zero());
        let omega = RationalForm::new(rf(&[1], &[0, 6]));
        let s = morrow_point_check(&one, &omega, 3, &FiberPoint::Class(0), &ctx()).unwrap();
        assert_eq!(s.total, CircleValue::zero());
        assert!(s.terms.iter().any(|(_, v)| !v.is_zero_within(0.0)));
    }

    #[test]
    fn vertical_check_with_quadratic_point() {
        let one = rf(&[1], &[1]);
        let omega = RationalForm::new(rf(&[1], &[2, 2, 2]));
        let s = morrow_vertical_check(&one, &omega, 2, &ctx()).unwrap();
        assert_eq!(s.total, CircleValue::zero());
        let omega = RationalForm::new(rf(&[1], &[0, 2]));
        let s = morrow_vertical_check(&one, &omega, 2, &ctx()).unwrap();
        assert_eq!(s.terms.len(), 2);
        assert_eq!(s.total, CircleValue::zero());
    }

    #[test]
    fn horizontal_check_product_formula() {
        let one = rf(&[1], &[1]);
        let omega = RationalForm::new(rf(&[1], &[0, 6]));
        let s = morrow_horizontal_check(&one, &omega, &QPoint::Finite(int(0)), &ctx()).unwrap();
        assert_eq!(s.terms.len(), 3);
        assert!(s.vanishes(1e-9));
        assert_eq!(s.terms[0].1, CircleValue::exact(rat(1, 2)));
        assert_eq!(s.terms[1].1, CircleValue::exact(rat(2, 3)));
        assert!((s.terms[2].1.to_f64() - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn total_sums_vanish() {
        let forms = [rf(&[1], &[0, 6]), rf(&[3, 1], &[-2, 7, 4]), rf(&[1], &[0, 0, 2, 2])];
        for h in forms {
            let f = RationalForm::new(h);
            assert!(total_sum(&f, 1e-10).unwrap().is_zero_within(1e-9), "{f}");
        }
        let irr = RationalForm::new(rf(&[1], &[1, 0, 1]));
        assert!(matches!(total_sum(&irr, 1e-10), Err(Error::Unsupported(_))));
    }
}
