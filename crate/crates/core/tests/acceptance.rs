//! Acceptance suite: one line per criterion, with its runtime budget.
//!
//! Run with `cargo test -p adelix-core --test acceptance`. The process exits
//! nonzero when a check fails. Parts of a criterion that are out of reach at
//! this scale are printed as FAIL with the reason, and do not fail the run.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use adelix_core::arith::factor::irreducibles_fp;
use adelix_core::arith::fp::Fp;
use adelix_core::arith::padic::{PAdic, EXACT};
use adelix_core::arith::poly::Poly;
use adelix_core::arith::rational::{int, ord_p, rat, Rational};
use adelix_core::arith::{LaurentSeries, RationalFunction};
use adelix_core::arith_curve::{h0_ar, h1_ar, rr_defect, vanishing_bound_check, MetrizedLattice};
use adelix_core::curve::{adelic_h0_h1, is_zero_in_h1, serre_pairing_matrix, CurveDivisor, CurvePlace};
use adelix_core::linalg;
use adelix_core::local2d::{
    lambda_inf, lambda_inf_rational, lambda_p_rational, res_eqchar, res_mixed, substitute_form, CircleValue, Coefficient,
    DifferentialForm, EqCharSeries, MixedSeries, TwoDimLocalElem,
};
use adelix_core::surface::{
    complex_d_surface, global_pairing, h0_ar_surface, morrow_horizontal_check, morrow_point_check,
    morrow_vertical_check, nondegeneracy_probe, orth_identities, orth_identities_f2_exhaustive, prop17_pieces,
    quotient_pairing_space, random_subspace, ComplexLevel, FiberPoint, PairingSpace, QFunction, QPoint, RationalForm,
    SurfaceAdele, SurfaceCurve, SurfaceDivisor, SurfaceFlag,
};
use adelix_core::{PrecisionCtx, Result};
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Result of one criterion. `shortfall` names parts that could not be run as stated.
struct Outcome {
    failures: Vec<String>,
    shortfall: Option<String>,
    summary: String,
}

impl Outcome {
    fn new(summary: impl Into<String>, failures: Vec<String>) -> Self {
        Outcome { failures, shortfall: None, summary: summary.into() }
    }
}

type Criterion = (u32, &'static str, u64, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 9] = [
    (1, "residue formulas and parameter invariance", 5, residue_formulas),
    (2, "product formula", 5, product_formula),
    (3, "curve Riemann-Roch and Serre duality", 60, curve_riemann_roch),
    (4, "residue theorems on P1 over Z", 120, residue_theorems),
    (5, "arithmetic Riemann-Roch", 30, arithmetic_riemann_roch),
    (6, "effective vanishing", 10, effective_vanishing),
    (7, "perpendicularity and orthogonality identities", 300, perpendicularity),
    (8, "complexes and cohomology plumbing", 30, complexes),
    (9, "non-degeneracy probes", 30, probes),
];

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut hard_failures = 0;
    for (n, name, budget, run) in CRITERIA {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs(budget);
        let (mark, detail) = match &outcome {
            Err(e) => ("FAIL", format!("error: {e}")),
            Ok(o) if !o.failures.is_empty() => {
                let shown: Vec<&str> = o.failures.iter().take(3).map(String::as_str).collect();
                ("FAIL", format!("{}; {} failures, e.g. {}", o.summary, o.failures.len(), shown.join(" | ")))
            }
            Ok(o) if slow => ("FAIL", format!("{}; over budget", o.summary)),
            Ok(o) => match &o.shortfall {
                Some(s) => ("FAIL", format!("{}; not attained: {s}", o.summary)),
                None => ("PASS", o.summary.clone()),
            },
        };
        if matches!(&outcome, Err(_)) || matches!(&outcome, Ok(o) if !o.failures.is_empty()) || slow {
            hard_failures += 1;
        }
        println!("criterion {n} [{mark}] {name} ({:.2}s of {budget}s): {detail}", elapsed.as_secs_f64());
    }
    if hard_failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rat(r: &mut impl Rng, num: i64, den: i64) -> Rational {
    rat(r.gen_range(-num..=num), r.gen_range(1..=den))
}

// ---------------------------------------------------------------- criterion 1

fn qseries(lo: i64, v: Vec<Rational>, prec: i64) -> LaurentSeries<Rational> {
    LaurentSeries::new(int(0), lo, v, prec)
}

/// A substitution t' = c1 t + c2 t^2 + ... with c1 ≠ 0.
fn substitution<C>(r: &mut ChaCha8Rng, unit: impl Fn(&mut ChaCha8Rng) -> C, any: impl Fn(&mut ChaCha8Rng) -> C) -> Vec<C> {
    let deg = r.gen_range(1..=4);
    let mut v = vec![unit(r)];
    for _ in 1..deg {
        v.push(any(r));
    }
    v
}

fn residue_formulas() -> Result<Outcome> {
    let mut bad = Vec::new();
    let w = DifferentialForm::new(TwoDimLocalElem::EqChar(EqCharSeries::Rational(qseries(-1, vec![int(1)], EXACT))), "t");
    if res_eqchar(&w)? != Coefficient::Rational(int(1)) {
        bad.push("res_eqchar(dt/t) != 1".into());
    }
    let m = MixedSeries::monomial(PAdic::from_i64(1, 2, 32), -1);
    let w = DifferentialForm::new(TwoDimLocalElem::Mixed(m), "u");
    if res_mixed(&w)?.reconstruct() != Some(int(-1)) {
        bad.push("res_mixed(du/u) != -1".into());
    }

    let mut r = rng(1);
    let primes = [2u64, 3, 5, 7];
    let mut count = 0;
    for k in 0..200 {
        let lo = r.gen_range(-5..=-1);
        let width = r.gen_range(16..=20);
        let hi = lo + width;
        let cap = hi - 2;
        let p = primes[k % 4];
        let (before, after) = match k % 4 {
            0 => {
                let v = (0..width).map(|_| small_rat(&mut r, 9, 4)).collect();
                let w = DifferentialForm::new(TwoDimLocalElem::EqChar(EqCharSeries::Rational(qseries(lo, v, hi))), "t");
                let nz = |g: &mut ChaCha8Rng| {
                    let x = rat(g.gen_range(1..=5), g.gen_range(1..=3));
                    if g.gen() { -x } else { x }
                };
                let c = substitution(&mut r, nz, |g| small_rat(g, 5, 3));
                let phi = TwoDimLocalElem::EqChar(EqCharSeries::Rational(qseries(1, c, EXACT)));
                let w2 = substitute_form(&w, &phi, "s", cap)?;
                (res_eqchar(&w)?, res_eqchar(&w2)?)
            }
            1 => {
                let fp = |g: &mut ChaCha8Rng| Fp::new(p, g.gen_range(0..p as i64));
                let unit = |g: &mut ChaCha8Rng| Fp::new(p, g.gen_range(1..p as i64));
                let v = (0..width).map(|_| fp(&mut r)).collect();
                let w = DifferentialForm::new(
                    TwoDimLocalElem::EqChar(EqCharSeries::Fp(LaurentSeries::new(Fp::zero(p), lo, v, hi))),
                    "t",
                );
                let c = substitution(&mut r, unit, fp);
                let phi = TwoDimLocalElem::EqChar(EqCharSeries::Fp(LaurentSeries::new(Fp::zero(p), 1, c, EXACT)));
                let w2 = substitute_form(&w, &phi, "s", cap)?;
                (res_eqchar(&w)?, res_eqchar(&w2)?)
            }
            2 => {
                let digits = 24;
                let pa = |g: &mut ChaCha8Rng| PAdic::from_rational(&small_rat(g, 50, 1), p, digits);
                let unit = |g: &mut ChaCha8Rng| PAdic::from_i64(g.gen_range(0..20) * p as i64 + g.gen_range(1..p as i64), p, digits);
                let v = (0..width).map(|_| PAdic::from_rational(&small_rat(&mut r, 30, 6), p, digits)).collect();
                let w = DifferentialForm::new(
                    TwoDimLocalElem::EqChar(EqCharSeries::PAdic(LaurentSeries::new(PAdic::zero(p), lo, v, hi))),
                    "t",
                );
                let c = substitution(&mut r, unit, pa);
                let phi = TwoDimLocalElem::EqChar(EqCharSeries::PAdic(LaurentSeries::new(PAdic::zero(p), 1, c, EXACT)));
                let w2 = substitute_form(&w, &phi, "s", cap)?;
                (res_eqchar(&w)?, res_eqchar(&w2)?)
            }
            _ => {
                let digits = 24;
                let pa = |g: &mut ChaCha8Rng| PAdic::from_i64(g.gen_range(-50..=50), p, digits);
                let unit = |g: &mut ChaCha8Rng| PAdic::from_i64(g.gen_range(0..20) * p as i64 + g.gen_range(1..p as i64), p, digits);
                // Coefficients shrink p-adically towards negative exponents.
                let v = (0..width)
                    .map(|i| {
                        let e = (-(lo + i)).max(0) as u32;
                        let scale = int(p as i64).pow(e as i32);
                        PAdic::from_rational(&(small_rat(&mut r, 30, 1) * scale), p, digits)
                    })
                    .collect();
                let m = MixedSeries::new(p, lo, v, hi, digits as i64);
                let w = DifferentialForm::new(TwoDimLocalElem::Mixed(m), "u");
                let c = substitution(&mut r, unit, pa);
                let phi = TwoDimLocalElem::EqChar(EqCharSeries::PAdic(LaurentSeries::new(PAdic::zero(p), 1, c, EXACT)));
                let w2 = substitute_form(&w, &phi, "s", cap)?;
                (Coefficient::PAdic(res_mixed(&w)?), Coefficient::PAdic(res_mixed(&w2)?))
            }
        };
        count += 1;
        let same = match (&before, &after) {
            (Coefficient::PAdic(a), Coefficient::PAdic(b)) => a.eq_at_precision(b),
            _ => before == after,
        };
        if !same {
            bad.push(format!("case {k}: {before:?} vs {after:?}"));
        }
    }
    Ok(Outcome::new(format!("2 reference residues, {count} substitutions over Q, F_p, Q_p((t)), Q_p{{{{u}}}}"), bad))
}

// ---------------------------------------------------------------- criterion 2

const PRIMES_TO_50: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// A random positive integer ≤ 10^6 whose prime factors are at most 50.
fn smooth(r: &mut impl Rng) -> i64 {
    let mut n = 1i64;
    let target = r.gen_range(0..=6);
    for _ in 0..target {
        let q = *PRIMES_TO_50.choose(r).unwrap() as i64;
        if n * q > 1_000_000 {
            break;
        }
        n *= q;
    }
    n
}

fn product_formula() -> Result<Outcome> {
    let mut r = rng(2);
    let mut bad = Vec::new();
    let mut worst = 0f64;
    for _ in 0..500 {
        let sign = if r.gen() { 1 } else { -1 };
        let x = rat(sign * smooth(&mut r), smooth(&mut r));
        let finite = PRIMES_TO_50.iter().map(|&p| lambda_p_rational(&x, p)).fold(CircleValue::zero(), |a, v| a.add(&v));
        if finite.add(&lambda_inf_rational(&x)) != CircleValue::zero() {
            bad.push(format!("exact sum at {x}"));
        }
        let xf = x.numer().to_string().parse::<f64>().unwrap() / x.denom().to_string().parse::<f64>().unwrap();
        let mixed = finite.add(&lambda_inf(xf, 1e-12));
        worst = worst.max(mixed.dist_to_zero());
        if !mixed.is_zero_within(1e-9) {
            bad.push(format!("archimedean sum at {x} is {}", mixed.to_f64()));
        }
    }
    Ok(Outcome::new(format!("500 rationals, worst archimedean distance {worst:.1e}"), bad))
}

// ---------------------------------------------------------------- criterion 3

fn places(p: u64) -> Vec<CurvePlace<Fp>> {
    let mut out = vec![CurvePlace::Infinity];
    for d in 1..=3 {
        out.extend(irreducibles_fp(p, d).into_iter().map(|f| CurvePlace::finite(f).expect("irreducible")));
    }
    out
}

fn check_curve_divisor(d: &CurveDivisor<Fp>, p: u64, ctx: &PrecisionCtx, bad: &mut Vec<String>) -> Result<()> {
    let z = Fp::zero(p);
    let c = adelic_h0_h1(d, &z, ctx)?;
    if c.h0 as i64 - c.h1 as i64 != c.degree + 1 {
        bad.push(format!("h0 - h1 != deg + 1 for {} over F_{p}", d.label()));
    }
    if c.h1 != c.h1_dual {
        bad.push(format!("h1 {} != h0(K - D) {} for {} over F_{p}", c.h1, c.h1_dual, d.label()));
    }
    // Second route: each complement representative must be nonzero in H^1(D)
    // when tested against an independently chosen auxiliary divisor.
    for i in c.model.complement.iter().take(2) {
        if is_zero_in_h1(&c.model.representative(*i, &z), d, &z)? {
            bad.push(format!("complement slot {i} vanishes in H1 for {} over F_{p}", d.label()));
        }
    }
    let m = serre_pairing_matrix(d, &z, ctx)?;
    if linalg::rank(&m, c.h1) != c.h1 || m.len() != c.h1 {
        bad.push(format!("Serre pairing rank below h1 = {} for {} over F_{p}", c.h1, d.label()));
    }
    Ok(())
}

fn curve_riemann_roch() -> Result<Outcome> {
    let ctx = PrecisionCtx::new(8, -48, 48, 1e-10)?;
    let mut r = rng(3);
    let mut bad = Vec::new();
    let mut count = 0;
    for p in [2u64, 3, 5, 7] {
        let ps = places(p);
        let mut divisors = vec![CurveDivisor::zero()];
        // Every multiple of a single place.
        for pl in &ps {
            let deg = pl.degree() as i64;
            for n in (-20 / deg)..=(20 / deg) {
                if n != 0 {
                    divisors.push(CurveDivisor::from_terms(vec![(pl.clone(), n)]));
                }
            }
        }
        // Random combinations of up to four places.
        for _ in 0..150 {
            let k = r.gen_range(2..=4);
            let mut d = CurveDivisor::zero();
            for pl in ps.choose_multiple(&mut r, k) {
                d.add_term(pl.clone(), r.gen_range(-4..=4));
            }
            if d.degree().abs() <= 20 {
                divisors.push(d);
            }
        }
        for d in &divisors {
            count += 1;
            check_curve_divisor(d, p, &ctx, &mut bad)?;
        }
    }
    Ok(Outcome::new(format!("{count} divisors over F_2, F_3, F_5, F_7"), bad))
}

// ---------------------------------------------------------------- criterion 4

fn linear(a: &Rational) -> QFunction {
    RationalFunction::from_poly(Poly::new(Rational::zero(), vec![-a.clone(), Rational::one()]))
}

/// c · Π (t - a_i)^{±1} with small rational a_i.
fn random_product(r: &mut impl Rng, roots: &[Rational]) -> (QFunction, Vec<Rational>) {
    let mut f = RationalFunction::constant(rat(r.gen_range(1..=6) * if r.gen() { 1 } else { -1 }, r.gen_range(1..=6)));
    let mut used = Vec::new();
    for _ in 0..r.gen_range(0..=3) {
        let a = roots.choose(r).unwrap().clone();
        let l = linear(&a);
        f = if r.gen_bool(0.6) { f.div(&l).expect("nonzero") } else { f.mul(&l) };
        used.push(a);
    }
    (f, used)
}

fn residue_theorems() -> Result<Outcome> {
    // Residues at a vertical flag need about (pole depth) x (fiber valuation)
    // exponents below zero, which reaches the 40s for these samples.
    let ctx = PrecisionCtx::new(24, -96, 32, 1e-10)?;
    let mut r = rng(4);
    let roots: Vec<Rational> =
        vec![int(0), int(1), int(-1), int(2), int(3), rat(1, 2), rat(-1, 3), rat(2, 5), rat(3, 4)];
    let mut bad = Vec::new();
    for k in 0..200 {
        let p = [2u64, 3, 5][k % 3];
        let (f, a1) = random_product(&mut r, &roots);
        let (h, a2) = random_product(&mut r, &roots);
        let omega = RationalForm::new(h);
        let x = if r.gen_bool(0.2) { FiberPoint::Infinity } else { FiberPoint::Class(r.gen_range(0..p)) };
        let candidates: Vec<QPoint> =
            a1.iter().chain(&a2).cloned().map(QPoint::Finite).chain([QPoint::Infinity, QPoint::Finite(int(7))]).collect();
        let a = candidates.choose(&mut r).unwrap();
        let tag = format!("f = {}, {omega}", adelix_core::surface::render_q(&f));
        let checks = [
            (format!("point {} over {p}", x.label()), morrow_point_check(&f, &omega, p, &x, &ctx)),
            (format!("vertical over {p}"), morrow_vertical_check(&f, &omega, p, &ctx)),
            (format!("horizontal at {a}"), morrow_horizontal_check(&f, &omega, a, &ctx)),
        ];
        for (what, res) in checks {
            match res {
                Ok(s) if s.total.is_exact() && s.total == CircleValue::zero() => {}
                Ok(s) if !s.total.is_exact() && what.starts_with("horizontal") && s.vanishes(1e-9) => {}
                Ok(s) => bad.push(format!("{what} for {tag}: total {:?}", s.total)),
                Err(e) => bad.push(format!("{what} for {tag}: {e}")),
            }
        }
    }
    Ok(Outcome::new("200 instances of each check, p in {2, 3, 5}", bad))
}

// ---------------------------------------------------------------- criterion 5

/// A random SPD matrix Q diag(λ) Qᵀ with log-uniform eigenvalues.
fn random_gram(r: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    let q = a.qr().q();
    let lambda = DVector::from_fn(n, |_, _| r.gen_range((0.04f64).ln()..(300f64).ln()).exp());
    let g = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    (0..n).map(|i| (0..n).map(|j| 0.5 * (g[(i, j)] + g[(j, i)])).collect()).collect()
}

fn arithmetic_riemann_roch() -> Result<Outcome> {
    let tol = 1e-12;
    let mut r = rng(5);
    let mut bad = Vec::new();
    let (mut worst, mut worst_cond, mut count) = (0f64, 0f64, 0);
    while count < 100 {
        let n = 1 + count % 3;
        let l = MetrizedLattice::new(random_gram(&mut r, n))?;
        let cond = l.condition_number();
        if cond > 1e4 {
            continue;
        }
        count += 1;
        worst_cond = worst_cond.max(cond);
        let defect = rr_defect(&l, tol)?;
        worst = worst.max(defect.abs());
        if defect.abs() >= 1e-8 {
            bad.push(format!("defect {defect:.2e} at {l}"));
        }
    }
    // Direct summation: Σ_{|k| ≤ 40} e^{-π k²} is exact to double precision.
    let direct = (-40i64..=40).map(|k| (-std::f64::consts::PI * (k * k) as f64).exp()).sum::<f64>().ln();
    let h = h0_ar(&MetrizedLattice::identity(1), tol)?;
    if (h - direct).abs() >= 1e-6 || (h - 0.0829015).abs() >= 1e-6 {
        bad.push(format!("h0_ar([1]) = {h}, direct sum {direct}"));
    }
    Ok(Outcome::new(
        format!("100 lattices, ranks 1-3, max condition {worst_cond:.0}, max defect {worst:.1e}; h0_ar([1]) = {h:.7}"),
        bad,
    ))
}

// ---------------------------------------------------------------- criterion 6

fn effective_vanishing() -> Result<Outcome> {
    let tol = 1e-14;
    let mut bad = Vec::new();
    for k in 0..=100 {
        let d = -(k as f64) / 10.0;
        let c = vanishing_bound_check(d, tol)?;
        if !c.ok {
            bad.push(format!("bound fails at d = {d:.1}: log h0 {} > log bound {}", c.log_h0, c.log_bound));
        }
    }
    // h1 of the rank-one lattice of degree d, i.e. Gram e^{-2d}.
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for k in -30..=50 {
        let d = k as f64 / 10.0;
        let h1 = h1_ar(&MetrizedLattice::rank_one((-2.0 * d).exp())?, tol)?;
        if h1 > prev || (h1 == prev && h1 > 0.0) {
            bad.push(format!("h1_ar not decreasing at d = {d:.1}"));
        }
        prev = h1;
        last = h1;
    }
    if last >= 1e-12 {
        bad.push(format!("h1_ar(5) = {last:e}"));
    }
    Ok(Outcome::new(format!("101 degrees in [-10, 0]; h1_ar decreasing on [-3, 5], h1_ar(5) = {last:.1e}"), bad))
}

// ---------------------------------------------------------------- criterion 7

fn form(num: &[i64], den: &[i64]) -> RationalForm {
    let z = Rational::zero();
    let poly = |c: &[i64]| Poly::new(z.clone(), c.iter().map(|&x| int(x)).collect());
    RationalForm::new(RationalFunction::new(poly(num), poly(den)).expect("nonzero denominator"))
}

fn points(v: &[Option<u64>]) -> Vec<FiberPoint> {
    v.iter().map(|x| x.map_or(FiberPoint::Infinity, FiberPoint::Class)).collect()
}

/// All vectors of F_p^n.
fn all_vectors(p: u64, n: usize) -> impl Iterator<Item = Vec<Fp>> {
    let total = p.pow(n as u32);
    (0..total).map(move |mut k| {
        (0..n)
            .map(|_| {
                let d = k % p;
                k /= p;
                Fp::new(p, d as i64)
            })
            .collect()
    })
}

/// {y : ⟨w, y⟩ = 0 for all w ∈ W} equals the span of `expected`, by enumeration.
fn brute_complement_matches(space: &PairingSpace, w: &[Vec<Fp>], expected: &[Vec<Fp>]) -> bool {
    let n = space.dim();
    let z = space.zero();
    let perp = |y: &[Fp]| w.iter().all(|x| space.pair(x, y) == z);
    if !expected.iter().all(|y| perp(y)) {
        return false;
    }
    let count = all_vectors(space.p, n).filter(|y| perp(y)).count() as u64;
    count == space.p.pow(linalg::rank(expected, n) as u32)
}

fn perpendicularity() -> Result<Outcome> {
    let ctx = PrecisionCtx::new(10, -16, 16, 1e-10)?;
    let mut r = rng(7);
    let v2 = SurfaceCurve::Vertical(2);
    let v3 = SurfaceCurve::Vertical(3);
    let d_at = |c: &SurfaceCurve, n: i64| SurfaceDivisor::from_terms([(c.clone(), n)]);
    // (curve, D, ω, points, window)
    let cases: Vec<(SurfaceCurve, SurfaceDivisor, RationalForm, Vec<FiberPoint>, (i64, i64))> = vec![
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[None]), (-1, 1)),
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[None]), (-2, 2)),
        (v2.clone(), d_at(&v2, 1), RationalForm::dt(), points(&[None]), (-3, 3)),
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[None]), (-4, 3)),
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[None]), (-4, 4)),
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[Some(0), None]), (-1, 1)),
        (v2.clone(), d_at(&v2, -1), RationalForm::dt(), points(&[Some(0), None]), (-2, 2)),
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[Some(0), Some(1), None]), (-1, 1)),
        (v2.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[Some(0), Some(1), None]), (-2, 2)),
        (v2.clone(), d_at(&v2, 2), form(&[1], &[0, 2]), points(&[Some(0), None]), (-1, 2)),
        (v2.clone(), SurfaceDivisor::zero(), form(&[1], &[0, -1, 1]), points(&[Some(0), Some(1), None]), (-1, 1)),
        (v2.clone(), d_at(&v2, 1), form(&[3], &[0, 1]), points(&[Some(0), Some(1), None]), (-2, 2)),
        (v3.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[None]), (-2, 2)),
        (v3.clone(), SurfaceDivisor::zero(), RationalForm::dt(), points(&[Some(0), None]), (-2, 2)),
        (v3.clone(), d_at(&v3, 1), form(&[3], &[0, 1]), points(&[Some(0), Some(1), Some(2), None]), (-1, 2)),
        (v3.clone(), SurfaceDivisor::zero(), form(&[1], &[0, 3]), points(&[Some(0), None]), (-3, 3)),
        (v3.clone(), d_at(&v3, -2), form(&[1], &[-1, 0, 1]), points(&[Some(1), Some(2), None]), (-2, 2)),
    ];
    let mut bad = Vec::new();
    let (mut spaces, mut exhaustive_pairs, mut singles, mut pairs) = (0, 0, 0, 0);
    let mut sampled_dims = Vec::new();
    const PAIR_LIMIT: usize = 6;
    for (c, d, omega, s, window) in &cases {
        let space = quotient_pairing_space(d, c, omega, s, *window, &ctx)?;
        let n = space.dim();
        let tag = format!("p={} D={} ω={omega} dim {n}", space.p, d.label());
        if n > 12 {
            bad.push(format!("{tag}: dimension above 12"));
            continue;
        }
        spaces += 1;
        if !space.is_nonsingular() {
            bad.push(format!("{tag}: singular pairing"));
            continue;
        }
        for k in space.n - 1..=space.n + 1 {
            let dp = d_at(c, k);
            let target = d_at(c, space.e - k);
            let w = space.a12_image_left(&dp);
            let expected = space.a12_image_right(&target);
            if !brute_complement_matches(&space, &w, &expected) {
                bad.push(format!("{tag}: complement of A12 image at multiplicity {k}"));
            }
            if !linalg::same_subspace(&space.orth_complement(&w)?, &expected, n) {
                bad.push(format!("{tag}: linear-algebra complement at multiplicity {k}"));
            }
        }
        for _ in 0..4 {
            let e: Vec<i64> = (0..space.points.len()).map(|_| r.gen_range(-2..=2)).collect();
            let w = space.fiber_image_left(&e);
            if !brute_complement_matches(&space, &w, &space.fiber_image_right(&e)) {
                bad.push(format!("{tag}: complement of the fiber image {e:?}"));
            }
        }
        if space.p == 2 && n <= 8 {
            let report = orth_identities_f2_exhaustive(&space, PAIR_LIMIT, 20_000, &mut r)?;
            singles += report.singles;
            pairs += report.pairs;
            if report.exhaustive_pairs {
                exhaustive_pairs += 1;
            } else {
                sampled_dims.push(n);
            }
            bad.extend(report.failures.iter().map(|f| format!("{tag}: {f}")));
        } else {
            for _ in 0..50 {
                let (a, b) = (random_subspace(space.p, n, &mut r), random_subspace(space.p, n, &mut r));
                bad.extend(orth_identities(&space, &a, &b)?.into_iter().map(|f| format!("{tag}: {f}")));
            }
        }
    }
    let mut out = Outcome::new(
        format!(
            "{spaces} spaces; F_2 bitmask checks: {singles} subspaces, {pairs} pairs, all pairs in {exhaustive_pairs} spaces"
        ),
        bad,
    );
    if !sampled_dims.is_empty() {
        sampled_dims.sort();
        sampled_dims.dedup();
        out.shortfall = Some(format!(
            "pairs of subspaces sampled, not exhausted, at dim {sampled_dims:?} (F_2^8 has 417199 subspaces, about 8.7e10 pairs)"
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------- criterion 8

fn random_function(r: &mut impl Rng) -> QFunction {
    let roots = [int(0), int(1), int(-2), rat(1, 2), rat(-1, 3)];
    random_product(r, &roots).0
}

fn random_adele(r: &mut ChaCha8Rng, ctx: &PrecisionCtx) -> Result<SurfaceAdele> {
    let mut a = SurfaceAdele::zero();
    for _ in 0..r.gen_range(1..=3) {
        let p = [2u64, 3, 5][r.gen_range(0..3)];
        let piece = match r.gen_range(0..6) {
            0 => SurfaceAdele::diagonal(random_function(r)),
            1 => {
                let x = FiberPoint::Class(r.gen_range(0..p));
                let c = PAdic::from_rational(&small_rat(r, 9, 1), p, ctx.padic_digits);
                let c = if c.is_zero() { PAdic::from_i64(1, p, ctx.padic_digits) } else { c };
                let k = r.gen_range(-3..=3);
                SurfaceAdele::at_flag(SurfaceFlag::vertical(p, x)?, TwoDimLocalElem::Mixed(MixedSeries::monomial(c, k)))?
            }
            2 => {
                let a = QPoint::Finite(small_rat(r, 3, 2));
                let c = PAdic::from_rational(&rat(r.gen_range(1..=9), 1), p, ctx.padic_digits);
                let s = LaurentSeries::monomial(c, r.gen_range(-2..=2));
                SurfaceAdele::at_flag(SurfaceFlag::horizontal(a, p)?, TwoDimLocalElem::EqChar(EqCharSeries::PAdic(s)))?
            }
            3 => {
                let a = if r.gen_bool(0.2) { QPoint::Infinity } else { QPoint::Finite(small_rat(r, 3, 2)) };
                let x = r.gen_range(0.5..3.0) * if r.gen() { 1.0 } else { -1.0 };
                SurfaceAdele::at_arch(a, LaurentSeries::monomial(x, r.gen_range(-2..=2)))
            }
            4 => SurfaceAdele::around_point(p, FiberPoint::Class(r.gen_range(0..p)), random_function(r)),
            _ => SurfaceAdele::along_curve(SurfaceCurve::Vertical(p), random_function(r)),
        };
        a = a.add(&piece)?;
    }
    Ok(a)
}

/// ord_C(f) for every curve, straight from the definition.
fn h0_oracle(f: &QFunction, d: &SurfaceDivisor) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let content = |p: &Poly<Rational>, q: u64| p.coeffs().iter().filter_map(|c| ord_p(c, q)).min().unwrap_or(0);
    for q in [2u64, 3, 5, 7, 11, 13] {
        let ord = content(f.num(), q) - content(f.den(), q);
        if ord + d.mult(&SurfaceCurve::Vertical(q)) < 0 {
            return Ok(false);
        }
    }
    for a in [int(0), int(1), int(-1), int(2), rat(1, 2), rat(-1, 3)] {
        if f.ord_at(&Poly::linear_root(&a))? + d.mult(&SurfaceCurve::horizontal(a)) < 0 {
            return Ok(false);
        }
    }
    Ok(f.ord_at_infinity()? + d.mult(&SurfaceCurve::horizontal_at_infinity()) >= 0)
}

fn complexes() -> Result<Outcome> {
    let ctx = PrecisionCtx::new(12, -16, 16, 1e-10)?;
    let mut r = rng(8);
    let mut bad = Vec::new();
    for k in 0..60 {
        let x = [random_adele(&mut r, &ctx)?, random_adele(&mut r, &ctx)?, random_adele(&mut r, &ctx)?];
        let level = if k % 2 == 0 { ComplexLevel::Zero(x) } else { ComplexLevel::One(x) };
        let dd = complex_d_surface(&complex_d_surface(&level)?)?;
        if !dd.is_zero() {
            bad.push(format!("d∘d ≠ 0 on sample {k}"));
        }
    }
    let top = ComplexLevel::Two(random_adele(&mut r, &ctx)?);
    if complex_d_surface(&top)? != ComplexLevel::Trivial || ComplexLevel::degree(3) != "0" || ComplexLevel::degree(-1) != "0"
    {
        bad.push("the complex does not stop after degree 2".into());
    }

    let d = SurfaceDivisor::from_terms([(SurfaceCurve::Vertical(2), 1), (SurfaceCurve::horizontal_at_infinity(), 3)]);
    let h = h0_ar_surface(&d)?;
    if h.rank() != 4 || h.scale != rat(1, 2) {
        bad.push(format!("H0(1*V2 + 3*Einf) has rank {} and ideal {}", h.rank(), h.scale));
    }
    let mut probes = 0;
    for num in [int(1), rat(1, 2), rat(1, 4), rat(3, 2), rat(1, 3), int(5)] {
        for k in 0..=4 {
            for den in [None, Some(int(0)), Some(int(1)), Some(rat(1, 2))] {
                let mut f = RationalFunction::from_poly(Poly::monomial(num.clone(), k));
                if let Some(a) = &den {
                    f = f.div(&linear(a))?;
                }
                let g = f.add(&RationalFunction::constant(rat(1, 2)));
                for f in [f, g] {
                    probes += 1;
                    if h.contains(&f)? != h0_oracle(&f, &d)? {
                        bad.push(format!("membership of {} disagrees with the oracle", adelix_core::surface::render_q(&f)));
                    }
                }
            }
        }
    }

    let v2 = SurfaceCurve::Vertical(2);
    let einf = SurfaceCurve::horizontal_at_infinity();
    for (n, expected) in [(0, (1, 0)), (3, (4, 0)), (-3, (0, 2))] {
        let d = SurfaceDivisor::from_terms([(einf.clone(), n)]);
        let pieces = prop17_pieces(&d, &v2, &ctx)?;
        let got = (pieces.h0_fiber, pieces.h1_fiber);
        if got != expected || (pieces.kernel_dim, pieces.cokernel_dim) != got {
            bad.push(format!(
                "D = {n}*Einf: fiber ({}, {}), kernel/cokernel ({}, {})",
                pieces.h0_fiber, pieces.h1_fiber, pieces.kernel_dim, pieces.cokernel_dim
            ));
        }
    }
    Ok(Outcome::new(format!("60 random complexes, {probes} H0 membership probes, 3 fiber sequences"), bad))
}

// ---------------------------------------------------------------- criterion 9

fn probes() -> Result<Outcome> {
    let ctx = PrecisionCtx::new(12, -16, 16, 1e-10)?;
    let mut r = rng(9);
    let mut bad = Vec::new();
    let forms = [RationalForm::dt(), form(&[1], &[0, 1]), form(&[2], &[1, 0, 1])];
    let mut count = 0;
    while count < 100 {
        let g = random_adele(&mut r, &ctx)?;
        if g.is_zero() {
            continue;
        }
        count += 1;
        let omega = forms.choose(&mut r).unwrap();
        match nondegeneracy_probe(&g, omega, &ctx)? {
            None => bad.push(format!("no witness for {}", g.label())),
            Some(w) => {
                let again = global_pairing(&w.witness, &g, omega, &ctx)?;
                let nonzero = !w.pairing.is_zero_within(w.pairing.tol().max(1e-12));
                if !nonzero || !again.add(&w.pairing.neg()).is_zero_within(1e-9) {
                    bad.push(format!("witness at {} pairs to {:?} with {}", w.location, w.pairing, g.label()));
                }
            }
        }
    }
    Ok(Outcome::new(format!("{count} random nonzero adeles"), bad))
}
