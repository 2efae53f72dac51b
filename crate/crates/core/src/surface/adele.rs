//! Truncated arithmetic adeles of P^1 over Z, the global residue pairing, the
//! level-two subspaces A01, A02, A12(D), and the adelic complex of a divisor.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::laurent::LaurentSeries;
use crate::arith::rational::Rational;
use crate::ctx::PrecisionCtx;
use crate::error::{Error, Result};
use crate::local2d::{lambda_inf, res_flag, CircleValue, DifferentialForm, EqCharSeries, TwoDimLocalElem};

use super::expand::{arch_residue, expand_at_arch, expand_at_flag, expand_form_at_arch, expand_form_at_flag, QFunction, RationalForm};
use super::geometry::{FiberPoint, QPoint, SurfaceCurve, SurfaceDivisor, SurfaceFlag};
use super::residue::{
    horizontal_finite_sum, meets, point_sum, polar_primes, pole_set, total_sum, vertical_sum,
};
use super::zq::fiber_valuation;

/// An adele of P^1 over Z with its archimedean part, stored as a sum of pieces
/// each living on a region of the flag set:
///
/// * `global` at every finite flag and every archimedean pair,
/// * `curves[C]` at every flag on C (and at (P, ∞) when C = E_P),
/// * `points[(p, x)]` at every flag through x,
/// * `arch_global` at every archimedean pair,
/// * `flags[δ]` and `arch[P]` at a single flag or pair.
///
/// All unlisted components are those of the rational pieces, so the
/// restricted-product conditions hold automatically.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurfaceAdele {
    pub global: Option<QFunction>,
    pub curves: BTreeMap<SurfaceCurve, QFunction>,
    pub points: BTreeMap<(u64, FiberPoint), QFunction>,
    pub arch_global: Option<QFunction>,
    pub flags: BTreeMap<SurfaceFlag, TwoDimLocalElem>,
    pub arch: BTreeMap<QPoint, LaurentSeries<f64>>,
}

impl SurfaceAdele {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The diagonal image of f, in every finite flag and every archimedean pair.
    pub fn diagonal(f: QFunction) -> Self {
        SurfaceAdele { global: Some(f), ..Self::default() }.normalized()
    }

    pub fn at_flag(flag: SurfaceFlag, x: TwoDimLocalElem) -> Result<Self> {
        if flag.point().degree() > 1 {
            return Err(Error::Unsupported(format!("adele components at {flag}: point of degree > 1")));
        }
        let mut a = Self::zero();
        a.flags.insert(flag, x);
        Ok(a.normalized())
    }

    pub fn at_arch(a: QPoint, x: LaurentSeries<f64>) -> Self {
        let mut s = Self::zero();
        s.arch.insert(a, x);
        s.normalized()
    }

    pub fn along_curve(c: SurfaceCurve, f: QFunction) -> Self {
        let mut s = Self::zero();
        s.curves.insert(c, f);
        s.normalized()
    }

    pub fn around_point(p: u64, x: FiberPoint, f: QFunction) -> Self {
        let mut s = Self::zero();
        s.points.insert((p, x), f);
        s.normalized()
    }

    pub fn at_all_arch(f: QFunction) -> Self {
        SurfaceAdele { arch_global: Some(f), ..Self::default() }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.global.as_ref().is_some_and(|f| f.is_zero()) {
            self.global = None;
        }
        if self.arch_global.as_ref().is_some_and(|f| f.is_zero()) {
            self.arch_global = None;
        }
        self.curves.retain(|_, f| !f.is_zero());
        self.points.retain(|_, f| !f.is_zero());
        self.flags.retain(|_, x| !x.is_zero());
        self.arch.retain(|_, x| !x.is_zero());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.global.is_none()
            && self.arch_global.is_none()
            && self.curves.is_empty()
            && self.points.is_empty()
            && self.flags.is_empty()
            && self.arch.is_empty()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        fn add_opt(a: &Option<QFunction>, b: &Option<QFunction>) -> Option<QFunction> {
            match (a, b) {
                (Some(x), Some(y)) => Some(x.add(y)),
                (Some(x), None) | (None, Some(x)) => Some(x.clone()),
                (None, None) => None,
            }
        }
        let mut out = SurfaceAdele {
            global: add_opt(&self.global, &o.global),
            arch_global: add_opt(&self.arch_global, &o.arch_global),
            ..self.clone()
        };
        for (c, f) in &o.curves {
            let v = out.curves.get(c).map_or_else(|| f.clone(), |g| g.add(f));
            out.curves.insert(c.clone(), v);
        }
        for (k, f) in &o.points {
            let v = out.points.get(k).map_or_else(|| f.clone(), |g| g.add(f));
            out.points.insert(k.clone(), v);
        }
        for (k, x) in &o.flags {
            let v = match out.flags.get(k) {
                Some(y) => y.add(x)?,
                None => x.clone(),
            };
            out.flags.insert(k.clone(), v);
        }
        for (k, x) in &o.arch {
            let v = out.arch.get(k).map_or_else(|| x.clone(), |y| y.add(x));
            out.arch.insert(k.clone(), v);
        }
        Ok(out.normalized())
    }

    pub fn neg(&self) -> Self {
        SurfaceAdele {
            global: self.global.as_ref().map(|f| f.neg()),
            arch_global: self.arch_global.as_ref().map(|f| f.neg()),
            curves: self.curves.iter().map(|(k, f)| (k.clone(), f.neg())).collect(),
            points: self.points.iter().map(|(k, f)| (k.clone(), f.neg())).collect(),
            flags: self.flags.iter().map(|(k, x)| (k.clone(), x.neg())).collect(),
            arch: self.arch.iter().map(|(k, x)| (k.clone(), x.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// The rational part of the component at a flag (everything but `flags`).
    fn rational_at(&self, flag: &SurfaceFlag) -> QFunction {
        let mut r = self.global.clone().unwrap_or_else(|| QFunction::zero(&Rational::zero()));
        if let Some(f) = self.curves.get(flag.curve()) {
            r = r.add(f);
        }
        if let Some(f) = self.points.get(&(flag.p(), flag.point().clone())) {
            r = r.add(f);
        }
        r
    }

    fn rational_at_arch(&self, a: &QPoint) -> QFunction {
        let mut r = self.global.clone().unwrap_or_else(|| QFunction::zero(&Rational::zero()));
        if let Some(f) = self.curves.get(&SurfaceCurve::Horizontal(a.clone())) {
            r = r.add(f);
        }
        if let Some(f) = &self.arch_global {
            r = r.add(f);
        }
        r
    }

    /// The component f_{C,x} in the local field of the flag.
    pub fn component(&self, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<TwoDimLocalElem> {
        let r = expand_at_flag(&self.rational_at(flag), flag, ctx)?;
        match self.flags.get(flag) {
            Some(x) => r.add(x),
            None => Ok(r),
        }
    }

    /// The component at the archimedean pair over a.
    pub fn arch_component(&self, a: &QPoint, ctx: &PrecisionCtx) -> Result<LaurentSeries<f64>> {
        let r = expand_at_arch(&self.rational_at_arch(a), a, ctx)?;
        Ok(match self.arch.get(a) {
            Some(x) => r.add(x),
            None => r,
        })
    }

    fn parts(&self) -> Vec<(Region, Part<'_>)> {
        let mut v = Vec::new();
        if let Some(f) = &self.global {
            v.push((Region::All, Part::Rational(f)));
        }
        for (c, f) in &self.curves {
            v.push((Region::Curve(c.clone()), Part::Rational(f)));
        }
        for ((p, x), f) in &self.points {
            v.push((Region::Point(*p, x.clone()), Part::Rational(f)));
        }
        if let Some(f) = &self.arch_global {
            v.push((Region::AllArch, Part::Rational(f)));
        }
        for (d, x) in &self.flags {
            v.push((Region::Flag(d.clone()), Part::Local(x)));
        }
        for (a, x) in &self.arch {
            v.push((Region::Arch(a.clone()), Part::Real(x)));
        }
        v
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(f) = &self.global {
            parts.push(format!("diag({})", super::expand::render_q(f)));
        }
        for (c, f) in &self.curves {
            parts.push(format!("{c}:{}", super::expand::render_q(f)));
        }
        for ((p, x), f) in &self.points {
            parts.push(format!("({}, {p}):{}", x.label(), super::expand::render_q(f)));
        }
        if let Some(f) = &self.arch_global {
            parts.push(format!("arch({})", super::expand::render_q(f)));
        }
        for (d, x) in &self.flags {
            parts.push(format!("{d}:<{}>", x.kind()));
        }
        for (a, _) in &self.arch {
            parts.push(format!("({a}, inf):<R((t))>"));
        }
        if parts.is_empty() {
            return "0".into();
        }
        parts.join(" + ")
    }
}

impl fmt::Display for SurfaceAdele {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Clone, Copy)]
enum Part<'a> {
    Rational(&'a QFunction),
    Local(&'a TwoDimLocalElem),
    Real(&'a LaurentSeries<f64>),
}

/// Sets of finite flags and archimedean pairs on which an adele piece lives.
#[derive(Clone, Debug, PartialEq)]
enum Region {
    All,
    AllArch,
    Curve(SurfaceCurve),
    Point(u64, FiberPoint),
    Flag(SurfaceFlag),
    Arch(QPoint),
    Empty,
}

impl Region {
    fn meet(&self, o: &Region) -> Region {
        use Region::*;
        match (self, o) {
            (Empty, _) | (_, Empty) => Empty,
            (All, r) | (r, All) => r.clone(),
            (AllArch, AllArch) => AllArch,
            (AllArch, Curve(SurfaceCurve::Horizontal(a))) | (Curve(SurfaceCurve::Horizontal(a)), AllArch) => {
                Arch(a.clone())
            }
            (AllArch, Arch(a)) | (Arch(a), AllArch) => Arch(a.clone()),
            (AllArch, _) | (_, AllArch) => Empty,
            (Curve(c), Curve(d)) => if c == d { Curve(c.clone()) } else { Empty },
            (Curve(c), Point(p, x)) | (Point(p, x), Curve(c)) => {
                if c.contains(*p, x) {
                    SurfaceFlag::new(c.clone(), *p, x.clone()).map(Flag).unwrap_or(Empty)
                } else {
                    Empty
                }
            }
            (Curve(c), Flag(d)) | (Flag(d), Curve(c)) => if d.curve() == c { Flag(d.clone()) } else { Empty },
            (Curve(SurfaceCurve::Horizontal(a)), Arch(b)) | (Arch(b), Curve(SurfaceCurve::Horizontal(a))) => {
                if a == b { Arch(a.clone()) } else { Empty }
            }
            (Curve(_), Arch(_)) | (Arch(_), Curve(_)) => Empty,
            (Point(p, x), Point(q, y)) => if p == q && x == y { Point(*p, x.clone()) } else { Empty },
            (Point(p, x), Flag(d)) | (Flag(d), Point(p, x)) => {
                if d.p() == *p && d.point() == x { Flag(d.clone()) } else { Empty }
            }
            (Point(..), Arch(_)) | (Arch(_), Point(..)) => Empty,
            (Flag(d), Flag(e)) => if d == e { Flag(d.clone()) } else { Empty },
            (Flag(_), Arch(_)) | (Arch(_), Flag(_)) => Empty,
            (Arch(a), Arch(b)) => if a == b { Arch(a.clone()) } else { Empty },
        }
    }
}

/// Σ of Res(form) over a region, for a rational form.
fn region_sum(form: &RationalForm, region: &Region, ctx: &PrecisionCtx) -> Result<CircleValue> {
    if form.is_zero() {
        return Ok(CircleValue::zero());
    }
    match region {
        Region::Empty => Ok(CircleValue::zero()),
        Region::All => total_sum(form, ctx.arch_tol),
        Region::AllArch => super::residue::arch_sum(form, ctx.arch_tol),
        Region::Curve(SurfaceCurve::Vertical(p)) => vertical_sum(form, *p),
        Region::Curve(SurfaceCurve::Horizontal(a)) => {
            Ok(horizontal_finite_sum(form, a)?.add(&arch_residue(form, a, ctx.arch_tol)?))
        }
        Region::Point(p, x) => point_sum(form, *p, x),
        Region::Flag(d) => super::expand::res_surface_flag(
            &QFunction::one(&Rational::zero()),
            &QFunction::one(&Rational::zero()),
            form,
            d,
            ctx,
        ),
        Region::Arch(a) => arch_residue(form, a, ctx.arch_tol),
    }
}

fn local_at(part: Part<'_>, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<TwoDimLocalElem> {
    match part {
        Part::Rational(f) => expand_at_flag(f, flag, ctx),
        Part::Local(x) => Ok(x.clone()),
        Part::Real(_) => Err(Error::IncompatibleRings("a real series at a finite flag".into())),
    }
}

fn real_at(part: Part<'_>, a: &QPoint, ctx: &PrecisionCtx) -> Result<LaurentSeries<f64>> {
    match part {
        Part::Rational(f) => expand_at_arch(f, a, ctx),
        Part::Real(x) => Ok(x.clone()),
        Part::Local(_) => Err(Error::IncompatibleRings("a finite-flag series at an archimedean pair".into())),
    }
}

/// Res at one flag of x·y·ω with x, y already local.
fn local_residue(x: &TwoDimLocalElem, y: &TwoDimLocalElem, omega: &RationalForm, flag: &SurfaceFlag, ctx: &PrecisionCtx) -> Result<CircleValue> {
    let w = expand_form_at_flag(omega, flag, ctx)?;
    let coeff = x.mul(y)?.mul(&w.coeff)?;
    res_flag(&DifferentialForm::new(coeff, w.param), ctx.arch_tol)
}

fn real_residue(x: &LaurentSeries<f64>, y: &LaurentSeries<f64>, omega: &RationalForm, a: &QPoint, ctx: &PrecisionCtx) -> Result<CircleValue> {
    let w = expand_form_at_arch(omega, a, ctx)?;
    Ok(lambda_inf(x.mul(y).mul(&w).coeff_at(-1)?, ctx.arch_tol))
}

/// ⟨F, G⟩_ω = Σ over finite flags of Res(f g ω) + Σ over archimedean pairs.
///
/// The sum is split along the pieces of F and G: two rational pieces pair over
/// the intersection of their regions through the residue sums on curves and at
/// points, all other combinations live at a single flag or pair.
pub fn global_pairing(f: &SurfaceAdele, g: &SurfaceAdele, omega: &RationalForm, ctx: &PrecisionCtx) -> Result<CircleValue> {
    let mut acc = CircleValue::zero();
    for (ra, a) in f.parts() {
        for (rb, b) in g.parts() {
            let region = ra.meet(&rb);
            let v = match (a, b, &region) {
                (_, _, Region::Empty) => continue,
                (Part::Rational(x), Part::Rational(y), r) => region_sum(&omega.times(&x.mul(y)), r, ctx)?,
                (_, _, Region::Flag(d)) => local_residue(&local_at(a, d, ctx)?, &local_at(b, d, ctx)?, omega, d, ctx)?,
                (_, _, Region::Arch(p)) => real_residue(&real_at(a, p, ctx)?, &real_at(b, p, ctx)?, omega, p, ctx)?,
                _ => unreachable!("a local piece meets only a single flag or pair"),
            };
            acc = acc.add(&v);
        }
    }
    Ok(acc)
}

/// The level-two subspaces of the adelic complex.
#[derive(Clone, Debug, PartialEq)]
pub enum SubspaceTag {
    A01,
    A02,
    A12(SurfaceDivisor),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// The first violated constraint.
    pub witness: Option<String>,
}

impl Membership {
    fn yes() -> Self {
        Membership { member: true, witness: None }
    }

    fn no(w: String) -> Self {
        Membership { member: false, witness: Some(w) }
    }
}

/// Decides membership in A01, A02 or A12(D).
///
/// A01 adeles are constant along each curve (pieces on all flags or on whole
/// curves) and uniform: the component on E_P equals the one at (P, ∞). A02
/// adeles are constant around each point with a single rational function at
/// infinity. A12(D) bounds ord_C of every component by -ord_C(D), at finite
/// flags and at archimedean pairs.
pub fn subspace_membership(a: &SurfaceAdele, tag: &SubspaceTag, ctx: &PrecisionCtx) -> Result<Membership> {
    match tag {
        SubspaceTag::A01 => {
            if let Some(x) = a.arch.keys().next() {
                return Ok(Membership::no(format!("uniformity: the component at ({x}, inf) differs from the one along E{x}")));
            }
            if a.arch_global.is_some() {
                return Ok(Membership::no("uniformity: the archimedean components differ from the horizontal ones".into()));
            }
            if let Some(((p, x), _)) = a.points.iter().next() {
                return Ok(Membership::no(format!("the piece around ({}, {p}) is not constant along the curves through it", x.label())));
            }
            if let Some(d) = a.flags.keys().next() {
                return Ok(Membership::no(format!("the component at {d} is not constant along {}", d.curve())));
            }
            Ok(Membership::yes())
        }
        SubspaceTag::A02 => {
            if let Some(c) = a.curves.keys().next() {
                return Ok(Membership::no(format!("the piece along {c} is not constant around the points of {c}")));
            }
            if let Some(d) = a.flags.keys().next() {
                return Ok(Membership::no(format!("the component at {d} is not constant around {}", d.point().label())));
            }
            if let Some(x) = a.arch.keys().next() {
                return Ok(Membership::no(format!("the archimedean part at ({x}, inf) is not a single rational function")));
            }
            Ok(Membership::yes())
        }
        SubspaceTag::A12(d) => a12_membership(a, d, ctx),
    }
}

enum Scope<'a> {
    All,
    Through(u64, &'a FiberPoint),
    Arch,
}

fn ord_horizontal(f: &QFunction, a: &QPoint) -> Result<i64> {
    match a {
        QPoint::Finite(r) => f.ord_at(&crate::arith::poly::Poly::linear_root(r)),
        QPoint::Infinity => f.ord_at_infinity(),
    }
}

/// The first curve in scope where ord_C(r) < -ord_C(D), skipping curves for
/// which `skip` holds.
fn rational_violation(
    r: &QFunction,
    d: &SurfaceDivisor,
    scope: &Scope<'_>,
    skip: &dyn Fn(&SurfaceCurve) -> bool,
) -> Result<Option<String>> {
    if r.is_zero() {
        return Ok(None);
    }
    let mut vertical: Vec<u64> = match scope {
        Scope::All => {
            let mut v = polar_primes(r)?;
            v.extend(d.terms().filter_map(|(c, n)| match c {
                SurfaceCurve::Vertical(p) if n < 0 => Some(*p),
                _ => None,
            }));
            v
        }
        Scope::Through(p, _) => vec![*p],
        Scope::Arch => Vec::new(),
    };
    vertical.sort_unstable();
    vertical.dedup();
    for p in vertical {
        let c = SurfaceCurve::Vertical(p);
        if skip(&c) {
            continue;
        }
        let v = fiber_valuation(r, p).unwrap();
        if v < -d.mult(&c) {
            return Ok(Some(format!("ord_{c} = {v} < {}", -d.mult(&c))));
        }
    }
    let ps = pole_set(r, false)?;
    if let Some(l) = &ps.irrational {
        let hit = match scope {
            Scope::Through(p, x) => meets(l, *p, x)?,
            _ => true,
        };
        if hit {
            return Ok(Some(format!("pole along a non-rational horizontal curve ({l:?})")));
        }
    }
    let mut horizontal = ps.rational;
    horizontal.extend(d.terms().filter_map(|(c, n)| match c {
        SurfaceCurve::Horizontal(a) if n < 0 => Some(a.clone()),
        _ => None,
    }));
    horizontal.sort();
    horizontal.dedup();
    for a in horizontal {
        if let Scope::Through(p, x) = scope {
            if a.reduction(*p) != **x {
                continue;
            }
        }
        let c = SurfaceCurve::Horizontal(a.clone());
        if skip(&c) {
            continue;
        }
        let v = ord_horizontal(r, &a)?;
        if v < -d.mult(&c) {
            let place = if matches!(scope, Scope::Arch) { format!(" at ({a}, inf)") } else { String::new() };
            return Ok(Some(format!("ord_{c} = {v} < {}{place}", -d.mult(&c))));
        }
    }
    Ok(None)
}

fn local_ord(x: &TwoDimLocalElem) -> Result<Option<i64>> {
    Ok(match x {
        TwoDimLocalElem::Mixed(m) => {
            if m.is_zero() {
                None
            } else {
                let known = m.terms().filter_map(|(_, c)| c.valuation()).min();
                match known {
                    Some(v) if v <= m.floor() => Some(v),
                    Some(v) if m.hi() >= crate::arith::padic::EXACT => Some(v),
                    _ => {
                        return Err(Error::precision(
                            "the valuation along the fiber is not determined inside the window",
                        ))
                    }
                }
            }
        }
        TwoDimLocalElem::EqChar(EqCharSeries::PAdic(s)) => s.valuation(),
        other => return Err(Error::IncompatibleRings(format!("{} at a finite flag", other.kind()))),
    })
}

fn a12_membership(a: &SurfaceAdele, d: &SurfaceDivisor, ctx: &PrecisionCtx) -> Result<Membership> {
    let zero = QFunction::zero(&Rational::zero());
    let global = a.global.clone().unwrap_or_else(|| zero.clone());
    let in_curves = |c: &SurfaceCurve| a.curves.contains_key(c);
    // Generic flags of every curve.
    if let Some(w) = rational_violation(&global, d, &Scope::All, &in_curves)? {
        return Ok(Membership::no(w));
    }
    for (c, f) in &a.curves {
        let r = global.add(f);
        let v = match c {
            SurfaceCurve::Vertical(p) => fiber_valuation(&r, *p),
            SurfaceCurve::Horizontal(x) => if r.is_zero() { None } else { Some(ord_horizontal(&r, x)?) },
        };
        if let Some(v) = v {
            if v < -d.mult(c) {
                return Ok(Membership::no(format!("ord_{c} = {v} < {}", -d.mult(c))));
            }
        }
    }
    // Flags through points carrying a point piece.
    for ((p, x), f) in &a.points {
        let has_flag = |c: &SurfaceCurve| {
            SurfaceFlag::new(c.clone(), *p, x.clone()).is_ok_and(|fl| a.flags.contains_key(&fl))
        };
        let skip = |c: &SurfaceCurve| in_curves(c) || has_flag(c);
        if let Some(w) = rational_violation(&global.add(f), d, &Scope::Through(*p, x), &skip)? {
            return Ok(Membership::no(format!("{w} at ({}, {p})", x.label())));
        }
        for (c, g) in a.curves.iter().filter(|(c, _)| c.contains(*p, x) && !has_flag(c)) {
            let flag = SurfaceFlag::new(c.clone(), *p, x.clone())?;
            let r = global.add(g).add(f);
            if let Some(w) = rational_violation(&r, d, &Scope::Through(*p, x), &|e| e != c)? {
                return Ok(Membership::no(format!("{w} at {flag}")));
            }
        }
    }
    for (flag, _) in &a.flags {
        let comp = a.component(flag, ctx)?;
        if let Some(v) = local_ord(&comp)? {
            let bound = -d.mult(flag.curve());
            if v < bound {
                return Ok(Membership::no(format!("ord_{} = {v} < {bound} at {flag}", flag.curve())));
            }
        }
    }
    // Archimedean pairs: ord_P(f_P) + ord_P(D_F) >= 0.
    let arch_base = match &a.arch_global {
        Some(h) => global.add(h),
        None => global.clone(),
    };
    let special = |c: &SurfaceCurve| match c {
        SurfaceCurve::Horizontal(x) => a.arch.contains_key(x) || a.curves.contains_key(c),
        _ => true,
    };
    if let Some(w) = rational_violation(&arch_base, d, &Scope::Arch, &special)? {
        return Ok(Membership::no(w));
    }
    for (c, f) in &a.curves {
        if let SurfaceCurve::Horizontal(x) = c {
            if a.arch.contains_key(x) {
                continue;
            }
            let r = arch_base.add(f);
            if let Some(w) = rational_violation(&r, d, &Scope::Arch, &|e| e != c)? {
                return Ok(Membership::no(w));
            }
        }
    }
    for x in a.arch.keys() {
        let comp = a.arch_component(x, ctx)?;
        let v = comp.terms().find(|(_, c)| c.abs() > ctx.arch_tol).map(|(k, _)| k);
        let bound = -d.mult(&SurfaceCurve::Horizontal(x.clone()));
        if let Some(v) = v {
            if v < bound {
                return Ok(Membership::no(format!("ord = {v} < {bound} at ({x}, inf)")));
            }
        }
    }
    Ok(Membership::yes())
}

/// Terms of the adelic complex of D, which has length three.
#[derive(Clone, Debug, PartialEq)]
pub enum ComplexLevel {
    /// (x0, x1, x2) ∈ A01 ⊕ A02 ⊕ A12(D).
    Zero([SurfaceAdele; 3]),
    /// (x01, x02, x12) ∈ A0 ⊕ A1(D) ⊕ A2(D).
    One([SurfaceAdele; 3]),
    /// x ∈ A012.
    Two(SurfaceAdele),
    /// Every term outside degrees 0, 1, 2 is the zero group.
    Trivial,
}

impl ComplexLevel {
    /// A description of the term in degree i.
    pub fn degree(i: i64) -> &'static str {
        match i {
            0 => "A01 + A02 + A12(D)",
            1 => "A0 + A1(D) + A2(D)",
            2 => "A012",
            _ => "0",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ComplexLevel::Zero(x) | ComplexLevel::One(x) => x.iter().all(|a| a.is_zero()),
            ComplexLevel::Two(x) => x.is_zero(),
            ComplexLevel::Trivial => true,
        }
    }
}

/// The differential of the adelic complex.
///
/// Degree 0 uses (x0, x1, x2) ↦ (x0 - x1, x1 - x2, x2 - x0), degree 1 sums the
/// three components, so that d∘d = 0.
pub fn complex_d_surface(level: &ComplexLevel) -> Result<ComplexLevel> {
    Ok(match level {
        ComplexLevel::Zero([x0, x1, x2]) => ComplexLevel::One([x0.sub(x1)?, x1.sub(x2)?, x2.sub(x0)?]),
        ComplexLevel::One([a, b, c]) => ComplexLevel::Two(a.add(b)?.add(c)?),
        ComplexLevel::Two(_) | ComplexLevel::Trivial => ComplexLevel::Trivial,
    })
}

/// A witness for the non-degeneracy of the pairing: an adele supported at a
/// single flag (or archimedean pair) pairing nontrivially with g.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeWitness {
    pub location: String,
    pub witness: SurfaceAdele,
    pub pairing: CircleValue,
}

/// Flags and pairs worth probing, in order: the declared ones, then one flag
/// on each curve, around each point, and the default flag for diagonal pieces.
fn probe_locations(g: &SurfaceAdele) -> Vec<std::result::Result<SurfaceFlag, QPoint>> {
    let mut out: Vec<std::result::Result<SurfaceFlag, QPoint>> = Vec::new();
    out.extend(g.flags.keys().cloned().map(Ok));
    out.extend(g.arch.keys().cloned().map(Err));
    for c in g.curves.keys() {
        match c {
            SurfaceCurve::Vertical(p) => out.extend(SurfaceFlag::vertical(*p, FiberPoint::Class(0)).ok().map(Ok)),
            SurfaceCurve::Horizontal(a) => {
                out.extend(SurfaceFlag::horizontal(a.clone(), 2).ok().map(Ok));
                out.push(Err(a.clone()));
            }
        }
    }
    for (p, x) in g.points.keys() {
        if x.degree() == 1 {
            out.extend(SurfaceFlag::vertical(*p, x.clone()).ok().map(Ok));
        }
    }
    if g.global.is_some() || g.arch_global.is_some() {
        out.extend(SurfaceFlag::vertical(2, FiberPoint::Class(0)).ok().map(Ok));
        out.push(Err(QPoint::Finite(Rational::zero())));
    }
    out
}

/// Builds f supported at one place with ⟨f, g⟩_ω ≠ 0, or `None` when g vanishes
/// at every probed place.
///
/// With g ω = Σ c_i u^i du at a finite flag and c_i ≠ 0 of valuation v, the
/// monomial p^{-v-1} u^{-1-i} has residue p^{-v-1} c_i (up to sign) whose
/// character is nonzero; at an archimedean pair (2 c_i)^{-1} t^{-1-i} gives 1/2.
pub fn nondegeneracy_probe(g: &SurfaceAdele, omega: &RationalForm, ctx: &PrecisionCtx) -> Result<Option<ProbeWitness>> {
    use crate::arith::padic::PAdic;
    use crate::local2d::MixedSeries;
    for loc in probe_locations(g) {
        let (location, f) = match &loc {
            Ok(flag) => {
                let w = expand_form_at_flag(omega, flag, ctx)?;
                let c = g.component(flag, ctx)?.mul(&w.coeff)?;
                let p = flag.p();
                let pick = match &c {
                    TwoDimLocalElem::Mixed(m) => m.terms().find_map(|(i, a)| a.valuation().map(|v| (i, v))),
                    TwoDimLocalElem::EqChar(EqCharSeries::PAdic(s)) => {
                        s.terms().find_map(|(i, a)| a.valuation().map(|v| (i, v)))
                    }
                    _ => None,
                };
                let Some((i, v)) = pick else { continue };
                let scale = PAdic::from_rational(&pow_p(p, -v - 1), p, ctx.padic_digits);
                let x = match &c {
                    TwoDimLocalElem::Mixed(_) => TwoDimLocalElem::Mixed(MixedSeries::monomial(scale, -1 - i)),
                    _ => TwoDimLocalElem::EqChar(EqCharSeries::PAdic(LaurentSeries::monomial(scale, -1 - i))),
                };
                (flag.label(), SurfaceAdele::at_flag(flag.clone(), x)?)
            }
            Err(a) => {
                let w = expand_form_at_arch(omega, a, ctx)?;
                let c = g.arch_component(a, ctx)?.mul(&w);
                let Some((i, ci)) = c.terms().find(|(_, x)| x.abs() > ctx.arch_tol).map(|(i, x)| (i, *x)) else {
                    continue;
                };
                (format!("({a}, inf)"), SurfaceAdele::at_arch(a.clone(), LaurentSeries::monomial(0.5 / ci, -1 - i)))
            }
        };
        let pairing = global_pairing(&f, g, omega, ctx)?;
        if !pairing.is_zero_within(ctx.arch_tol) {
            return Ok(Some(ProbeWitness { location, witness: f, pairing }));
        }
    }
    Ok(None)
}

fn pow_p(p: u64, e: i64) -> Rational {
    let b = Rational::from_integer(p.into());
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b, (-e) as usize).recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::padic::PAdic;
    use crate::arith::poly::Poly;
    use crate::arith::rational::{int, rat};
    use crate::arith::ratfunc::RationalFunction;
    use crate::local2d::MixedSeries;

    fn rf(num: &[i64], den: &[i64]) -> QFunction {
        let z = Rational::zero();
        let poly = |c: &[i64]| Poly::new(z.clone(), c.iter().map(|&x| int(x)).collect());
        RationalFunction::new(poly(num), poly(den)).unwrap()
    }

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(16, -16, 8, 1e-10).unwrap()
    }

    fn half_over_u() -> SurfaceAdele {
        let flag = SurfaceFlag::vertical(2, FiberPoint::Class(0)).unwrap();
        let x = MixedSeries::monomial(PAdic::from_rational(&rat(1, 2), 2, 16), -1);
        SurfaceAdele::at_flag(flag, TwoDimLocalElem::Mixed(x)).unwrap()
    }

    #[test]
    fn diagonal_pairing_vanishes() {
        let omega = RationalForm::dt();
        let f = SurfaceAdele::diagonal(rf(&[1], &[0, 2]));
        let g = SurfaceAdele::diagonal(rf(&[3, 1], &[-1, 0, 1]));
        let v = global_pairing(&f, &g, &omega, &ctx()).unwrap();
        assert!(v.is_zero_within(1e-9), "{v}");
    }

    #[test]
    fn pairing_at_one_flag() {
        let one = SurfaceAdele::diagonal(rf(&[1], &[1]));
        let v = global_pairing(&half_over_u(), &one, &RationalForm::dt(), &ctx()).unwrap();
        assert_eq!(v, CircleValue::exact(rat(1, 2)));
        let w = global_pairing(&one, &half_over_u(), &RationalForm::dt(), &ctx()).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn pieces_pair_like_their_expansions() {
        let c = ctx();
        let omega = RationalForm::new(rf(&[1], &[1, 1]));
        let f = SurfaceAdele::along_curve(SurfaceCurve::horizontal(int(0)), rf(&[1], &[0, 1]))
            .add(&SurfaceAdele::around_point(3, FiberPoint::Class(1), rf(&[1], &[0, 3])))
            .unwrap();
        let g = SurfaceAdele::along_curve(SurfaceCurve::Vertical(3), rf(&[1, 1], &[1]))
            .add(&SurfaceAdele::diagonal(rf(&[1], &[2])))
            .unwrap();
        let v = global_pairing(&f, &g, &omega, &c).unwrap();
        let w = global_pairing(&g, &f, &omega, &c).unwrap();
        assert!(v.add(&w.neg()).is_zero_within(1e-9));
        // At a single flag a rational piece pairs through its expansion.
        for d in [
            SurfaceFlag::horizontal(QPoint::Finite(int(0)), 3).unwrap(),
            SurfaceFlag::vertical(3, FiberPoint::Class(1)).unwrap(),
        ] {
            let x = SurfaceAdele::at_flag(d.clone(), f.component(&d, &c).unwrap()).unwrap();
            let y = SurfaceAdele::at_flag(d.clone(), g.component(&d, &c).unwrap()).unwrap();
            let through_pieces = global_pairing(&x, &g, &omega, &c).unwrap();
            let local = global_pairing(&x, &y, &omega, &c).unwrap();
            assert_eq!(through_pieces, local, "{d}");
        }
    }

    #[test]
    fn uniformity_violation() {
        let c = ctx();
        let e0 = SurfaceCurve::horizontal(int(0));
        let f = SurfaceAdele::along_curve(e0, rf(&[1], &[0, 1]));
        assert!(subspace_membership(&f, &SubspaceTag::A01, &c).unwrap().member);
        let zero0 = QPoint::Finite(int(0));
        let arch = f.arch_component(&zero0, &c).unwrap().neg();
        let g = f.add(&SurfaceAdele::at_arch(zero0, arch)).unwrap();
        assert!(g.arch_component(&QPoint::Finite(int(0)), &c).unwrap().is_zero());
        let m = subspace_membership(&g, &SubspaceTag::A01, &c).unwrap();
        assert!(!m.member);
        assert!(m.witness.unwrap().contains("uniformity"));
        assert!(subspace_membership(&g, &SubspaceTag::A02, &c).unwrap().witness.is_some());
    }

    #[test]
    fn a12_bounds_the_fiber_pole() {
        let c = ctx();
        let v2 = SurfaceCurve::Vertical(2);
        for n in -1..3 {
            let d = SurfaceDivisor::from_terms([(v2.clone(), n)]);
            let m = subspace_membership(&half_over_u(), &SubspaceTag::A12(d), &c).unwrap();
            assert_eq!(m.member, n >= 1, "n = {n}: {:?}", m.witness);
        }
    }

    #[test]
    fn a12_for_rational_pieces() {
        let c = ctx();
        let f = SurfaceAdele::diagonal(rf(&[1], &[0, 2]));
        let e0 = SurfaceCurve::horizontal(int(0));
        let v2 = SurfaceCurve::Vertical(2);
        let both = SurfaceDivisor::from_terms([(e0.clone(), 1), (v2.clone(), 1)]);
        assert!(subspace_membership(&f, &SubspaceTag::A12(both), &c).unwrap().member);
        let only_e0 = SurfaceDivisor::from_terms([(e0.clone(), 1)]);
        let m = subspace_membership(&f, &SubspaceTag::A12(only_e0), &c).unwrap();
        assert!(m.witness.unwrap().contains("V2"));
        let only_v2 = SurfaceDivisor::from_terms([(v2, 1)]);
        assert!(!subspace_membership(&f, &SubspaceTag::A12(only_v2), &c).unwrap().member);
        // The piece around (t ≡ 1, 3) has no pole through that point.
        let g = SurfaceAdele::around_point(3, FiberPoint::Class(1), rf(&[1], &[0, 1]));
        assert!(subspace_membership(&g, &SubspaceTag::A12(SurfaceDivisor::zero()), &c).unwrap().member);
        let h = SurfaceAdele::around_point(3, FiberPoint::Class(0), rf(&[1], &[0, 1]));
        assert!(!subspace_membership(&h, &SubspaceTag::A12(SurfaceDivisor::zero()), &c).unwrap().member);
    }

    #[test]
    fn d_squared_is_zero() {
        let a = SurfaceAdele::diagonal(rf(&[1], &[0, 2]));
        let b = SurfaceAdele::around_point(2, FiberPoint::Class(1), rf(&[1, 1], &[1]));
        let c = half_over_u();
        let x = ComplexLevel::Zero([a, b, c]);
        let dx = complex_d_surface(&x).unwrap();
        assert!(!dx.is_zero());
        assert!(complex_d_surface(&dx).unwrap().is_zero());
        assert_eq!(ComplexLevel::degree(3), "0");
    }

    #[test]
    fn probe_finds_a_witness() {
        let c = ctx();
        let g = SurfaceAdele::diagonal(rf(&[1], &[1]));
        let w = nondegeneracy_probe(&g, &RationalForm::dt(), &c).unwrap().unwrap();
        assert_eq!(w.pairing, CircleValue::exact(rat(1, 2)));
        let w = nondegeneracy_probe(&half_over_u(), &RationalForm::dt(), &c).unwrap().unwrap();
        assert!(!w.pairing.is_zero_within(1e-12));
        assert!(nondegeneracy_probe(&SurfaceAdele::zero(), &RationalForm::dt(), &c).unwrap().is_none());
    }
}
