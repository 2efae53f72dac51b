//! Embeddings of Q(t) into the local fields of flags and archimedean pairs,
//! and the residue maps composed with the canonical characters.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith::fp::Fp;
use crate::arith::laurent::LaurentSeries;
use crate::arith::padic::PAdic;
use crate::arith::poly::Poly;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::rational::{factor_u64, format_rational, Rational};
use crate::ctx::PrecisionCtx;
use crate::curve::CurveAdele;
use crate::error::{Error, Result};
use crate::local2d::{
    complete_tensor_real, lambda_inf, lambda_p_rational, res_flag, CircleValue, DifferentialForm, EqCharSeries,
    MixedSeries, TwoDimLocalElem,
};

use super::geometry::{FiberPoint, QPoint, SurfaceCurve, SurfaceFlag};
use super::zq::{expand_vertical, fiber_valuation, pole_depth, vertical_form_residue};

pub type QFunction = RationalFunction<Rational>;

/// A rational differential h(t) dt on P^1 over Q.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    coeff: QFunction,
}

impl RationalForm {
    pub fn new(coeff: QFunction) -> Self {
        RationalForm { coeff }
    }

    pub fn dt() -> Self {
        RationalForm { coeff: RationalFunction::one(&Rational::zero()) }
    }

    pub fn coeff(&self) -> &QFunction {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// f·ω.
    pub fn times(&self, f: &QFunction) -> Self {
        RationalForm { coeff: self.coeff.mul(f) }
    }

    pub fn label(&self) -> String {
        format!("({}) dt", render_q(&self.coeff))
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

pub fn render_q(f: &QFunction) -> String {
    f.render("t", format_rational)
}

/// f in the chart around the fiber point x: t itself, or s = 1/t at infinity.
fn chart_function(f: &QFunction, at_infinity: bool) -> QFunction {
    if at_infinity {
        f.at_infinity()
    } else {
        f.clone()
    }
}

/// Coefficient of the form h dt in the chart around x.
fn chart_form(h: &QFunction, at_infinity: bool) -> QFunction {
    if at_infinity {
        h.form_at_infinity()
    } else {
        h.clone()
    }
}

/// The point of the chart cut out by x: t ≡ a, the closed point q, or s ≡ 0.
fn chart_point(x: &FiberPoint, p: u64) -> Poly<Fp> {
    x.poly(p).unwrap_or_else(|| Poly::linear_root(&Fp::zero(p)))
}

fn window_check(lo: i64, ctx: &PrecisionCtx, what: &str) -> Result<()> {
    if lo < ctx.v_lo {
        return Err(Error::WindowTooSmall { what: what.into(), needed: lo });
    }
    Ok(())
}

/// Expansion of a chart function at a vertical flag through a rational fiber point.
fn mixed_expansion(g: &QFunction, x: &FiberPoint, p: u64, ctx: &PrecisionCtx) -> Result<MixedSeries> {
    let q = chart_point(x, p);
    if g.is_zero() {
        return Ok(MixedSeries::zero_at(p, crate::arith::padic::EXACT));
    }
    // Inverting a denominator that vanishes at x to order i0 spreads the series
    // down to u^{-M i0}; the p-adic precision M is capped to keep that in the window.
    let i0 = pole_depth(g, &q)?;
    let mut m = ctx.padic_digits as i64;
    if i0 > 0 {
        m = m.min(-ctx.v_lo / i0);
        // Below p^0 nothing of the residue survives.
        let v = fiber_valuation(g, p).unwrap_or(0);
        if m < 1 || v + m < 0 {
            return Err(Error::WindowTooSmall {
                what: format!("pole of order {i0} at the flag with fiber valuation {v}"),
                needed: -i0 * (-v).max(1),
            });
        }
    }
    let e = expand_vertical(g, &q, m as u32, ctx.v_hi)?;
    let abs = e.v + m;
    let coeffs: Vec<PAdic> = e
        .series
        .coeffs
        .iter()
        .map(|c| PAdic::from_scaled_int(p, &c[0], e.v, m))
        .collect();
    let s = MixedSeries::with_floor(p, e.series.lo, coeffs, e.series.hi, abs, e.v);
    window_check(s.lo().min(e.series.lo), ctx, "vertical expansion")?;
    Ok(s)
}

fn q_laurent(g: &QFunction, a: &QPoint, ctx: &PrecisionCtx) -> Result<LaurentSeries<Rational>> {
    let s = match a {
        QPoint::Finite(a) => g.laurent_at(a, ctx.v_hi)?,
        QPoint::Infinity => g.laurent_at_zero(ctx.v_hi)?,
    };
    if let Some(v) = s.valuation() {
        window_check(v, ctx, "horizontal expansion")?;
    }
    Ok(s)
}

fn padic_laurent(s: &LaurentSeries<Rational>, p: u64, digits: u32) -> LaurentSeries<PAdic> {
    s.map(&PAdic::zero(p), |c| PAdic::from_rational(c, p, digits))
}

fn check_rational_point(flag: &SurfaceFlag) -> Result<()> {
    if flag.point().degree() > 1 {
        return Err(Error::Unsupported(format!(
            "expansions at {flag}: points of degree > 1 carry an unramified coefficient field; only residues are computed there"
        )));
    }
    Ok(())
}

fn chart_is_infinity(flag: &SurfaceFlag) -> bool {
    match flag.curve() {
        SurfaceCurve::Vertical(_) => *flag.point() == FiberPoint::Infinity,
        SurfaceCurve::Horizontal(a) => *a == QPoint::Infinity,
    }
}

fn expand_chart(g: &QFunction, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<TwoDimLocalElem> {
    match flag.curve() {
        SurfaceCurve::Vertical(p) => Ok(TwoDimLocalElem::Mixed(mixed_expansion(g, flag.point(), *p, ctx)?)),
        SurfaceCurve::Horizontal(a) => {
            let s = q_laurent(g, a, ctx)?;
            Ok(TwoDimLocalElem::EqChar(EqCharSeries::PAdic(padic_laurent(&s, flag.p(), ctx.padic_digits))))
        }
    }
}

/// The image of f in the local field of the flag.
///
/// Vertical flags give Q_p{{u}} with u = t - a for the lift a in [0, p) (or
/// u = 1/t at infinity); horizontal flags E_a give Q_p((t - a)) (or Q_p((1/t))).
pub fn expand_at_flag(f: &QFunction, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<TwoDimLocalElem> {
    check_rational_point(flag)?;
    expand_chart(&chart_function(f, chart_is_infinity(flag)), flag, ctx)
}

/// h dt written as (coefficient) du in the flag's parameter.
pub fn expand_form_at_flag(omega: &RationalForm, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<DifferentialForm> {
    check_rational_point(flag)?;
    let coeff = expand_chart(&chart_form(omega.coeff(), chart_is_infinity(flag)), flag, ctx)?;
    Ok(DifferentialForm::new(coeff, flag.parameters().1))
}

/// The image of f in R((t - a)) (or R((1/t))) at the archimedean pair over a.
pub fn expand_at_arch(f: &QFunction, a: &QPoint, ctx: &PrecisionCtx) -> Result<LaurentSeries<f64>> {
    let g = chart_function(f, *a == QPoint::Infinity);
    Ok(complete_tensor_real(&q_laurent(&g, a, ctx)?))
}

pub fn expand_form_at_arch(omega: &RationalForm, a: &QPoint, ctx: &PrecisionCtx) -> Result<LaurentSeries<f64>> {
    let g = chart_form(omega.coeff(), *a == QPoint::Infinity);
    Ok(complete_tensor_real(&q_laurent(&g, a, ctx)?))
}

/// Madunts-Zhukov lifting of an adele on the fiber over p: each local tail of a
/// rational point is lifted digit-wise into Q_p{{u}} at the vertical flag there.
///
/// The lift is local and coefficient-wise, so a diagonal part must be expanded
/// into tails first.
pub fn mz_lift(a: &CurveAdele<Fp>, p: u64, digits: u32) -> Result<Vec<(SurfaceFlag, TwoDimLocalElem)>> {
    if a.global.is_some() {
        return Err(Error::invalid("the lift acts on local tails; expand the diagonal part first"));
    }
    let mut out = Vec::with_capacity(a.tails.len());
    for (place, tail) in &a.tails {
        let x = FiberPoint::from_place(place)?;
        if x.degree() > 1 {
            return Err(Error::Unsupported(format!("lifting a tail at the point {} of degree > 1", x.label())));
        }
        let coeffs: Vec<Fp> = tail.digits.iter().map(|d| d.coeff(0)).collect();
        let series = LaurentSeries::new(Fp::zero(p), tail.lo, coeffs, tail.prec);
        let flag = SurfaceFlag::vertical(p, x)?;
        out.push((flag, TwoDimLocalElem::Mixed(MixedSeries::lift(&series, digits))));
    }
    Ok(out)
}

/// Res_{C,x}(f g ω) through the local expansions at the flag.
pub fn res_surface_flag(
    f: &QFunction,
    g: &QFunction,
    omega: &RationalForm,
    flag: &SurfaceFlag,
    ctx: &PrecisionCtx,
) -> Result<CircleValue> {
    let form = omega.times(&f.mul(g));
    if flag.point().degree() > 1 {
        return flag_residue(&form, flag);
    }
    res_flag(&expand_form_at_flag(&form, flag, ctx)?, ctx.arch_tol)
}

/// Res_{P,∞}(f g ω) through the real expansion.
pub fn res_surface_arch(
    f: &QFunction,
    g: &QFunction,
    omega: &RationalForm,
    a: &QPoint,
    ctx: &PrecisionCtx,
) -> Result<CircleValue> {
    arch_residue(&omega.times(&f.mul(g)), a, ctx.arch_tol)
}

/// Residue of the chart coefficient at a rational point, exactly.
pub(crate) fn rational_residue(omega: &RationalForm, a: &QPoint) -> Result<Rational> {
    if omega.is_zero() {
        return Ok(Rational::zero());
    }
    let at_inf = *a == QPoint::Infinity;
    let g = chart_form(omega.coeff(), at_inf);
    let s = match a {
        QPoint::Finite(a) => g.laurent_at(a, 0)?,
        QPoint::Infinity => g.laurent_at_zero(0)?,
    };
    s.coeff_at(-1)
}

/// Res at a flag without materializing the expansion: the trace formula along
/// vertical curves (any point degree), the exact residue along horizontal ones.
pub(crate) fn flag_residue(omega: &RationalForm, flag: &SurfaceFlag) -> Result<CircleValue> {
    match flag.curve() {
        SurfaceCurve::Vertical(p) => {
            let at_inf = *flag.point() == FiberPoint::Infinity;
            let h = chart_form(omega.coeff(), at_inf);
            Ok(CircleValue::exact(vertical_form_residue(&h, &chart_point(flag.point(), *p))?))
        }
        SurfaceCurve::Horizontal(a) => Ok(lambda_p_rational(&rational_residue(omega, a)?, flag.p())),
    }
}

pub(crate) fn arch_residue(omega: &RationalForm, a: &QPoint, tol: f64) -> Result<CircleValue> {
    if omega.is_zero() {
        return Ok(CircleValue::zero());
    }
    let g = chart_form(omega.coeff(), *a == QPoint::Infinity);
    let s = match a {
        QPoint::Finite(a) => g.laurent_at(a, 0)?,
        QPoint::Infinity => g.laurent_at_zero(0)?,
    };
    Ok(lambda_inf(complete_tensor_real(&s).coeff_at(-1)?, tol))
}

/// Distinct primes dividing a nonzero integer that fits in 64 bits.
pub(crate) fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    let n = n
        .magnitude()
        .to_u64()
        .ok_or_else(|| Error::Unsupported(format!("factoring {n}, which exceeds 64 bits")))?;
    Ok(factor_u64(n).into_iter().map(|(p, _)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn rf(num: &[i64], den: &[i64]) -> QFunction {
        let z = Rational::zero();
        let poly = |c: &[i64]| Poly::new(z.clone(), c.iter().map(|&x| int(x)).collect());
        RationalFunction::new(poly(num), poly(den)).unwrap()
    }

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(16, -16, 8, 1e-10).unwrap()
    }

    fn mixed(e: TwoDimLocalElem) -> MixedSeries {
        match e {
            TwoDimLocalElem::Mixed(m) => m,
            other => panic!("expected a mixed series, got {}", other.kind()),
        }
    }

    #[test]
    fn vertical_expansions() {
        let flag = SurfaceFlag::vertical(2, FiberPoint::Class(0)).unwrap();
        let m = mixed(expand_at_flag(&rf(&[1], &[0, 2]), &flag, &ctx()).unwrap());
        assert_eq!(m.coeff_at(-1).unwrap().to_rational(), rat(1, 2));
        assert!(m.coeff_at(0).unwrap().is_zero());
        // 1/(t - 1) = -Σ u^k at t ≡ 0 mod 2.
        let m = mixed(expand_at_flag(&rf(&[1], &[-1, 1]), &flag, &ctx()).unwrap());
        for k in 0..8 {
            assert!(m.coeff_at(k).unwrap().eq_at_precision(&PAdic::from_i64(-1, 2, 16)), "u^{k}");
        }
        assert!(m.coeff_at(8).is_err());
    }

    #[test]
    fn horizontal_expansion_is_the_parameter() {
        let flag = SurfaceFlag::horizontal(QPoint::Finite(int(0)), 3).unwrap();
        let TwoDimLocalElem::EqChar(EqCharSeries::PAdic(s)) = expand_at_flag(&rf(&[0, 1], &[1]), &flag, &ctx()).unwrap()
        else {
            panic!("expected Q_p((t))")
        };
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.coeff_at(1).unwrap().to_rational(), int(1));
    }

    #[test]
    fn residues_of_dt_over_2t() {
        let one = rf(&[1], &[1]);
        let omega = RationalForm::new(rf(&[1], &[0, 2]));
        let c = ctx();
        let v = SurfaceFlag::vertical(2, FiberPoint::Class(0)).unwrap();
        assert_eq!(res_surface_flag(&one, &one, &omega, &v, &c).unwrap(), CircleValue::exact(rat(1, 2)));
        let h = SurfaceFlag::horizontal(QPoint::Finite(int(0)), 2).unwrap();
        assert_eq!(res_surface_flag(&one, &one, &omega, &h, &c).unwrap(), CircleValue::exact(rat(1, 2)));
        let a = res_surface_arch(&one, &one, &omega, &QPoint::Finite(int(0)), &c).unwrap();
        assert!((a.to_f64() - 0.5).abs() < 1e-12);
        assert_eq!(flag_residue(&omega, &v).unwrap(), CircleValue::exact(rat(1, 2)));
    }

    #[test]
    fn expansion_residue_agrees_with_trace_formula() {
        // Poles congruent to the point exercise the weighted inversion.
        let c = ctx();
        let forms = [rf(&[1], &[-2, 1]), rf(&[3], &[0, -4, 2]), rf(&[1, 1], &[4, 0, 2]), rf(&[5], &[0, 0, 4])];
        for h in forms {
            let omega = RationalForm::new(h);
            for x in [FiberPoint::Class(0), FiberPoint::Class(1), FiberPoint::Infinity] {
                let flag = SurfaceFlag::vertical(2, x).unwrap();
                let direct = flag_residue(&omega, &flag).unwrap();
                let via = res_flag(&expand_form_at_flag(&omega, &flag, &c).unwrap(), c.arch_tol).unwrap();
                assert_eq!(direct, via, "{omega} at {flag}");
            }
        }
    }

    #[test]
    fn lift_then_reduce() {
        use crate::curve::{CurveAdele, CurvePlace, LocalTail};
        let p = 3;
        let tail = LaurentSeries::new(Fp::zero(p), -1, vec![Fp::new(p, 2), Fp::new(p, 1)], 2);
        let local = LocalTail { lo: -1, digits: vec![Poly::constant(Fp::new(p, 2)), Poly::constant(Fp::new(p, 1))], prec: 2 };
        let a = CurveAdele { global: None, tails: vec![(CurvePlace::Finite(Poly::linear_root(&Fp::new(p, 1))), local)] };
        let lifted = mz_lift(&a, p, 8).unwrap();
        assert_eq!(lifted.len(), 1);
        assert_eq!(*lifted[0].0.point(), FiberPoint::Class(1));
        let m = mixed(lifted[0].1.clone());
        assert_eq!(m.reduce_mod_p().unwrap(), tail);
        assert_eq!(m.coeff_at(-1).unwrap().to_rational(), int(2));
    }
}
