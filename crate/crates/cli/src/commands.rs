//! Argument definitions and dispatch.

use adelix_core::arith::fp::Fp;
use adelix_core::arith::ratfunc::RationalFunction;
use adelix_core::arith::rational::{format_rational, parse_rational, Rational};
use adelix_core::arith_curve::{
    adelic_complex_arith, deg_ar, h0_ar, h1_ar, vanishing_bound_check, MetrizedLattice,
};
use adelix_core::curve::adelic_h0_h1;
use adelix_core::curve::place::render_poly;
use adelix_core::json::ToJson;
use adelix_core::linalg;
use adelix_core::local2d::{
    lambda_fp, lambda_inf, lambda_p, res_eqchar, res_mixed, Coefficient, DifferentialForm, EqCharSeries,
    TwoDimLocalElem,
};
use adelix_core::surface::{
    expand_form_at_arch, expand_form_at_flag, h0_ar_surface, morrow_horizontal_check, morrow_point_check,
    morrow_vertical_check, quotient_pairing_space, render_q, res_surface_arch, res_surface_flag, FiberPoint, QFunction,
    QPoint, ResidueSum, SurfaceCurve, SurfaceFlag,
};
use adelix_core::{Error, PrecisionCtx};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::divisor::{parse_divisor, poly_mod_p};
use crate::expr::{parse_form, parse_function, parse_poly};
use crate::report::{approx, circle, CliError, Report};
use crate::selftest;

#[derive(Parser, Debug)]
#[command(name = "adelix", version, about = "Residues, adelic cohomology and duality on P^1 over Z")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Relative p-adic digits kept in expansions.
    #[arg(long, global = true)]
    pub padic_prec: Option<u32>,
    /// Laurent window: `N` for [-N, N) or `lo,hi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_window: Option<String>,
    /// Tolerance for archimedean values.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Residue of a form in a one- or two-dimensional local field.
    Residue(ResidueArgs),
    /// h0 and h1 of a divisor on P^1 over F_p.
    CurveCoh {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    /// Arithmetic Riemann-Roch for a metrized lattice or a divisor on Spec Z.
    ArithRr {
        /// Gram matrix as JSON, e.g. "[[1,0],[0,4]]".
        #[arg(long, conflicts_with = "divisor", required_unless_present = "divisor")]
        gram: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
    },
    /// Computations on P^1 over Z.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Quick runs of the invariant suites.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    #[value(name = "Q")]
    Q,
    #[value(name = "Fp")]
    Fp,
    #[value(name = "Qp")]
    Qp,
    #[value(name = "R")]
    R,
}

#[derive(Args, Debug)]
pub struct ResidueArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
    /// Q((t)), F_p((t)), Q_p{{t}} or R((t)).
    #[arg(long, value_enum, default_value = "Q")]
    pub field: FieldArg,
    #[arg(long)]
    pub p: Option<u64>,
    /// Point of expansion: a rational number or `inf`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub at: String,
}

#[derive(Subcommand, Debug)]
pub enum SurfaceCmd {
    /// Res_{C,x}(f g ω) at a flag (`V2@t=0`, `E1/2@3`, `Einf@5`) or an archimedean pair (`arch@t=0`).
    Residue {
        #[arg(long)]
        flag: String,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        g: String,
    },
    /// Residue theorems around a point, along a fiber, or along a horizontal curve.
    #[command(subcommand)]
    Check(CheckCmd),
    /// H^0 of a divisor as a lattice in Q(t).
    H0 {
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    /// Finite model of the pairing between quotients along the fiber over p.
    Pairing {
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        divisor: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long)]
        p: u64,
        /// Fiber points, e.g. "0,1,inf"; all rational points by default.
        #[arg(long)]
        points: Option<String>,
        /// Exponent window `lo,hi` on the left.
        #[arg(long, default_value = "0,2", allow_hyphen_values = true)]
        window: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    /// Sum over the curves through a closed point, e.g. `--at "2,t=0"`.
    Point {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        at: String,
    },
    /// Sum over the points of the fiber over p.
    Vertical {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        p: u64,
    },
    /// Sum over the places of a horizontal curve E_a, archimedean one included.
    Horizontal {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

pub const CONVENTION_NOTE: &str =
    "convention: standard residue; finite places use the fractional part, the real place uses x -> -x mod 1";
const BASE_NOTE: &str = "base field Q: all trace maps are identities";

impl GlobalOpts {
    pub fn precision(&self) -> Result<PrecisionCtx, CliError> {
        let mut ctx = PrecisionCtx::default();
        if let Some(d) = self.padic_prec {
            ctx.padic_digits = d;
        }
        if let Some(w) = &self.t_window {
            let parse = |s: &str| s.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("bad --t-window '{w}'")));
            match w.split_once(',') {
                Some((lo, hi)) => (ctx.v_lo, ctx.v_hi) = (parse(lo)?, parse(hi)?),
                None => {
                    let n = parse(w)?;
                    (ctx.v_lo, ctx.v_hi) = (-n, n);
                }
            }
        }
        if let Some(t) = self.tol {
            ctx.arch_tol = t;
        }
        ctx.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(ctx)
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Residue(_) => "residue",
            Command::CurveCoh { .. } => "curve-coh",
            Command::ArithRr { .. } => "arith-rr",
            Command::Surface(s) => match s {
                SurfaceCmd::Residue { .. } => "surface residue",
                SurfaceCmd::Check(CheckCmd::Point { .. }) => "surface check point",
                SurfaceCmd::Check(CheckCmd::Vertical { .. }) => "surface check vertical",
                SurfaceCmd::Check(CheckCmd::Horizontal { .. }) => "surface check horizontal",
                SurfaceCmd::H0 { .. } => "surface h0",
                SurfaceCmd::Pairing { .. } => "surface pairing",
            },
            Command::Selftest { .. } => "selftest",
        }
    }
}

/// Runs a parsed command line and returns its report.
pub fn execute(cli: &Cli, args: Vec<String>) -> Report {
    let ctx = cli.global.precision();
    let mut report = Report::new(cli.command.name(), args, ctx.as_ref().copied().unwrap_or_default());
    let outcome = ctx.and_then(|ctx| dispatch(&cli.command, &ctx, &mut report));
    if let Err(e) = outcome {
        report.error = Some(e);
    }
    report
}

fn dispatch(cmd: &Command, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    match cmd {
        Command::Residue(a) => residue(a, ctx, r),
        Command::CurveCoh { p, divisor } => curve_coh(*p, divisor, ctx, r),
        Command::ArithRr { gram, divisor } => arith_rr(gram.as_deref(), divisor.as_deref(), ctx, r),
        Command::Surface(s) => surface(s, ctx, r),
        Command::Selftest { quick } => {
            selftest::run(*quick, r);
            Ok(())
        }
    }
}

fn need_prime(p: Option<u64>) -> Result<u64, CliError> {
    let p = p.ok_or_else(|| CliError::Usage("this field needs --p".into()))?;
    if !adelix_core::arith::rational::is_prime(p) {
        return Err(CliError::Usage(format!("{p} is not prime")));
    }
    Ok(p)
}

fn prime(p: u64) -> Result<u64, CliError> {
    need_prime(Some(p))
}

pub fn parse_qpoint(s: &str) -> Result<QPoint, CliError> {
    let s = s.trim();
    if s == "inf" {
        return Ok(QPoint::Infinity);
    }
    parse_rational(s).map(QPoint::Finite).map_err(|_| CliError::Usage(format!("expected a rational number or inf, got '{s}'")))
}

fn window_guard(v: Option<i64>, ctx: &PrecisionCtx) -> Result<(), CliError> {
    match v {
        Some(v) if v < ctx.v_lo => Err(Error::WindowTooSmall { what: "lower Laurent bound".into(), needed: v }.into()),
        _ => Ok(()),
    }
}

fn residue(a: &ResidueArgs, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    let omega = parse_form(&a.form)?;
    let at = parse_qpoint(&a.at)?;
    r.set("form", json!(omega.label()));
    r.set("at", json!(at.label()));
    let chart = |q: &QFunction| match at {
        QPoint::Infinity => q.form_at_infinity(),
        QPoint::Finite(_) => q.clone(),
    };
    let param = match &at {
        QPoint::Infinity => "1/t".to_string(),
        QPoint::Finite(x) if x == &Rational::from_integer(0.into()) => "t".to_string(),
        QPoint::Finite(x) => format!("t - {}", format_rational(x)),
    };
    let (elem, value, character) = match a.field {
        FieldArg::Q => {
            let g = chart(omega.coeff());
            let s = match &at {
                QPoint::Finite(x) => g.laurent_at(x, ctx.v_hi)?,
                QPoint::Infinity => g.laurent_at_zero(ctx.v_hi)?,
            };
            window_guard(s.valuation(), ctx)?;
            let form = DifferentialForm::new(TwoDimLocalElem::EqChar(EqCharSeries::Rational(s)), param.clone());
            let res = res_eqchar(&form)?;
            r.note("Q((t)) carries no place, so no character is applied");
            (form.coeff, res.to_json(), None)
        }
        FieldArg::Fp => {
            let p = need_prime(a.p)?;
            let g = chart(omega.coeff());
            let (Some(num), Some(den)) = (poly_mod_p(g.num(), p), poly_mod_p(g.den(), p)) else {
                return Err(CliError::Invalid(format!("{} is not {p}-integral", omega.label())));
            };
            if den.is_zero() {
                return Err(CliError::Invalid(format!("the denominator of {} vanishes mod {p}", omega.label())));
            }
            let h = RationalFunction::new(num, den)?;
            let s = match &at {
                QPoint::Finite(x) => {
                    let Some(xp) = poly_mod_p(&adelix_core::arith::poly::Poly::constant(x.clone()), p) else {
                        return Err(CliError::Invalid(format!("{} is not {p}-integral", format_rational(x))));
                    };
                    h.laurent_at(&xp.coeff(0), ctx.v_hi)?
                }
                QPoint::Infinity => h.laurent_at_zero(ctx.v_hi)?,
            };
            window_guard(s.valuation(), ctx)?;
            let form = DifferentialForm::new(TwoDimLocalElem::EqChar(EqCharSeries::Fp(s)), param.clone());
            let res = res_eqchar(&form)?;
            let ch = match &res {
                Coefficient::Fp(x) => lambda_fp(x),
                _ => unreachable!("F_p series"),
            };
            (form.coeff, res.to_json(), Some(ch))
        }
        FieldArg::R => {
            let s = expand_form_at_arch(&omega, &at, ctx)?;
            let x = s.coeff_at(-1)?;
            let form = DifferentialForm::new(TwoDimLocalElem::EqChar(EqCharSeries::Real(s)), param.clone());
            (form.coeff, approx(x, ctx.arch_tol), Some(lambda_inf(x, ctx.arch_tol)))
        }
        FieldArg::Qp => {
            let p = need_prime(a.p)?;
            let flag = SurfaceFlag::vertical(p, at.reduction(p))?;
            let form = expand_form_at_flag(&omega, &flag, ctx)?;
            let res = res_mixed(&form)?;
            r.set("flag", json!(flag.label()));
            let ch = lambda_p(&res)?;
            r.note("Q_p{{u}}: the residue is minus the coefficient of u^-1");
            (form.coeff, res.to_json(), Some(ch))
        }
    };
    r.set("field", json!(elem.kind()));
    r.set("parameter", json!(match a.field {
        FieldArg::Qp => elem_param(&at, a.p.unwrap_or(2)),
        _ => param,
    }));
    r.set("expansion", elem.to_json());
    r.set("residue", value);
    r.set("character", character.as_ref().map_or(Value::Null, circle));
    r.note(CONVENTION_NOTE);
    r.note(BASE_NOTE);
    Ok(())
}

/// The mixed-characteristic parameter: t minus the lift in [0, p), or 1/t.
fn elem_param(at: &QPoint, p: u64) -> String {
    match at.reduction(p) {
        FiberPoint::Class(0) => "t".into(),
        FiberPoint::Class(a) => format!("t - {a}"),
        _ => "1/t".into(),
    }
}

fn curve_coh(p: u64, divisor: &str, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    let p = prime(p)?;
    let d = parse_divisor(divisor)?.to_curve(p)?;
    let coh = adelic_h0_h1(&d, &Fp::zero(p), ctx)?;
    r.set("divisor", json!(d.label()));
    r.set("p", json!(p));
    r.set("h0", json!(coh.h0));
    r.set("h1", json!(coh.h1));
    r.set("deg", json!(coh.degree));
    let basis: Vec<Value> = coh.basis.iter().map(|f| json!(render_fp(f))).collect();
    r.set("basis", json!(basis));
    let rr = coh.h0 as i64 - coh.h1 as i64 == coh.degree + 1;
    r.check("riemann_roch", rr, json!({ "h0 - h1": coh.h0 as i64 - coh.h1 as i64, "deg + 1": coh.degree + 1 }));
    let dual = coh.h1 == coh.h1_dual;
    r.check("serre_duality", dual, json!({ "h1": coh.h1, "h0(K - D)": coh.h1_dual }));
    Ok(())
}

fn render_fp(f: &RationalFunction<Fp>) -> String {
    let n = render_poly(f.num());
    if f.den().degree() == Some(0) {
        return n;
    }
    format!("({n})/({})", render_poly(f.den()))
}

fn arith_rr(gram: Option<&str>, divisor: Option<&str>, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    let tol = ctx.arch_tol;
    let (h0, h1, deg, lattice) = match (gram, divisor) {
        (Some(g), _) => {
            let rows: Vec<Vec<f64>> =
                serde_json::from_str(g).map_err(|e| CliError::Usage(format!("--gram must be a JSON matrix: {e}")))?;
            let l = MetrizedLattice::new(rows)?;
            (h0_ar(&l, tol)?, h1_ar(&l, tol)?, deg_ar(&l), l)
        }
        (None, Some(d)) => {
            let d = parse_divisor(d)?.to_arith()?;
            let c = adelic_complex_arith(&d, tol)?;
            r.set("divisor", json!(d.to_string()));
            r.set("h0_group", json!(c.h0_group.ideal_label()));
            r.set("h1_group", json!(c.h1_description()));
            (c.h0, c.h1, c.degree, c.h0_group.lattice.clone())
        }
        (None, None) => return Err(CliError::Usage("give --gram or --divisor".into())),
    };
    let defect = h0 - h1 - deg;
    r.set("rank", json!(lattice.rank()));
    r.set("h0", approx(h0, tol));
    r.set("h1", approx(h1, tol));
    r.set("deg", approx(deg, tol));
    r.set("rr_defect", approx(defect, 2.0 * tol));
    let bound = if lattice.rank() == 1 && deg <= 0.0 {
        let v = vanishing_bound_check(deg, tol)?;
        r.set("vanishing_bound", approx(v.bound, tol));
        r.check("effective_vanishing", v.ok, json!({ "log_h0": approx(v.log_h0, tol), "log_bound": approx(v.log_bound, tol) }));
        json!(v.ok)
    } else {
        r.note("the effective vanishing bound is checked for rank-one lattices of degree <= 0");
        Value::Null
    };
    r.set("bound_ok", bound);
    r.check("riemann_roch", defect.abs() < 1e-8, approx(defect, 1e-8));
    Ok(())
}

fn surface(cmd: &SurfaceCmd, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    match cmd {
        SurfaceCmd::Residue { flag, form, f, g } => surface_residue(flag, form, f, g, ctx, r),
        SurfaceCmd::Check(c) => surface_check(c, ctx, r),
        SurfaceCmd::H0 { divisor } => {
            let d = parse_divisor(divisor)?.to_surface()?;
            let h = h0_ar_surface(&d)?;
            r.set("divisor", json!(d.label()));
            r.set("rank", json!(h.rank()));
            r.set("coefficient_ideal", json!(format!("({})Z", format_rational(&h.scale))));
            r.set("factor", json!(render_q(&h.factor)));
            r.set("degree_bound", json!(h.degree));
            r.set("basis", json!(h.basis().iter().map(render_q).collect::<Vec<_>>()));
            Ok(())
        }
        SurfaceCmd::Pairing { divisor, omega, p, points, window } => {
            pairing(divisor, omega, *p, points.as_deref(), window, ctx, r)
        }
    }
}

/// `V2@t=0`, `V3@t=inf`, `V2@(t^2+t+1)`, `E1/2@3`, `Einf@5`, `arch@t=0`.
fn parse_flag(s: &str) -> Result<Result<SurfaceFlag, QPoint>, CliError> {
    let bad = || CliError::Usage(format!("bad flag '{s}'; expected V<p>@t=<a>, E<a>@<p> or arch@t=<a>"));
    let (curve, at) = s.split_once('@').ok_or_else(bad)?;
    let at = at.trim();
    if curve == "arch" {
        return Ok(Err(parse_qpoint(at.strip_prefix("t=").unwrap_or(at))?));
    }
    if let Some(p) = curve.strip_prefix('V') {
        let p = prime(p.parse().map_err(|_| bad())?)?;
        let x = if at.starts_with('(') {
            let q = parse_poly(at.trim_start_matches('(').trim_end_matches(')'))?;
            let q = poly_mod_p(&q, p).ok_or_else(|| CliError::Invalid(format!("{at} is not {p}-integral")))?;
            FiberPoint::from_poly(&q)?
        } else {
            parse_qpoint(at.strip_prefix("t=").unwrap_or(at))?.reduction(p)
        };
        return Ok(Ok(SurfaceFlag::vertical(p, x)?));
    }
    if let Some(a) = curve.strip_prefix('E') {
        let a = if a == "inf" { QPoint::Infinity } else { parse_qpoint(a)? };
        let p = prime(at.parse().map_err(|_| bad())?)?;
        return Ok(Ok(SurfaceFlag::horizontal(a, p)?));
    }
    Err(bad())
}

fn surface_residue(flag: &str, form: &str, f: &str, g: &str, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    let omega = parse_form(form)?;
    let (f, g) = (parse_function(f)?, parse_function(g)?);
    let total = omega.times(&f.mul(&g));
    r.set("form", json!(total.label()));
    let value = match parse_flag(flag)? {
        Ok(flag) => {
            r.set("flag", json!(flag.label()));
            let (curve_param, point_param) = flag.parameters();
            r.set("parameters", json!([curve_param, point_param]));
            if flag.point().degree() == 1 {
                let local = expand_form_at_flag(&total, &flag, ctx)?;
                r.set("field", json!(local.coeff.kind()));
                r.set("expansion", local.coeff.to_json());
                if let TwoDimLocalElem::Mixed(_) = local.coeff {
                    r.set("residue", res_mixed(&local)?.to_json());
                }
            } else {
                r.note("points of degree > 1: the residue is computed through the trace, without an expansion");
            }
            res_surface_flag(&f, &g, &omega, &flag, ctx)?
        }
        Err(a) => {
            r.set("arch", json!(a.label()));
            let s = expand_form_at_arch(&total, &a, ctx)?;
            r.set("field", json!("R((t))"));
            r.set("expansion", s.to_json());
            res_surface_arch(&f, &g, &omega, &a, ctx)?
        }
    };
    r.set("value", circle(&value));
    r.note(CONVENTION_NOTE);
    r.note(BASE_NOTE);
    Ok(())
}

/// `2,t=0`, `3,inf`, `2,(t^2+t+1)`.
fn parse_fiber_point(s: &str) -> Result<(u64, FiberPoint), CliError> {
    let bad = || CliError::Usage(format!("bad point '{s}'; expected <p>,t=<a> or <p>,(<poly>)"));
    let (p, x) = s.split_once(',').ok_or_else(bad)?;
    let p = prime(p.trim().parse().map_err(|_| bad())?)?;
    let x = x.trim();
    let x = if x.starts_with('(') {
        let q = parse_poly(&x[1..x.len().saturating_sub(1).max(1)])?;
        let q = poly_mod_p(&q, p).ok_or_else(|| CliError::Invalid(format!("{x} is not {p}-integral")))?;
        FiberPoint::from_poly(&q)?
    } else {
        parse_qpoint(x.strip_prefix("t=").unwrap_or(x))?.reduction(p)
    };
    Ok((p, x))
}

fn report_sum(name: &str, s: &ResidueSum, ctx: &PrecisionCtx, r: &mut Report) {
    let terms: Vec<Value> = s.terms.iter().map(|(l, v)| json!({ "location": l, "value": circle(v) })).collect();
    r.set("terms", json!(terms));
    r.set("total", circle(&s.total));
    let tol = if s.total.is_exact() { 0.0 } else { s.total.tol().max(ctx.arch_tol) };
    r.check(name, s.vanishes(tol), json!({ "total": circle(&s.total) }));
    r.note(CONVENTION_NOTE);
}

fn surface_check(c: &CheckCmd, ctx: &PrecisionCtx, r: &mut Report) -> Result<(), CliError> {
    match c {
        CheckCmd::Point { form, f, at } => {
            let (omega, f) = (parse_form(form)?, parse_function(f)?);
            let (p, x) = parse_fiber_point(at)?;
            r.set("point", json!(format!("{} over {p}", x.label())));
            let s = morrow_point_check(&f, &omega, p, &x, ctx)?;
            report_sum("residues_around_point", &s, ctx, r);
        }
        CheckCmd::Vertical { form, f, p } => {
            let (omega, f) = (parse_form(form)?, parse_function(f)?);
            let p = prime(*p)?;
            r.set("curve", json!(SurfaceCurve::Vertical(p).label()));
            let s = morrow_vertical_check(&f, &omega, p, ctx)?;
            report_sum("residues_along_fiber", &s, ctx, r);
        }
        CheckCmd::Horizontal { form, f, at } => {
            let (omega, f) = (parse_form(form)?, parse_function(f)?);
            let a = parse_qpoint(at)?;
            r.set("curve", json!(SurfaceCurve::Horizontal(a.clone()).label()));
            let s = morrow_horizontal_check(&f, &omega, &a, ctx)?;
            report_sum("residues_along_horizontal_curve", &s, ctx, r);
        }
    }
    Ok(())
}

fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("bad window '{s}'; expected lo,hi"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn pairing(
    divisor: &str,
    omega: &str,
    p: u64,
    points: Option<&str>,
    window: &str,
    ctx: &PrecisionCtx,
    r: &mut Report,
) -> Result<(), CliError> {
    let p = prime(p)?;
    let d = parse_divisor(divisor)?.to_surface()?;
    let omega = parse_form(omega)?;
    let window = parse_window(window)?;
    let pts: Vec<FiberPoint> = match points {
        None => (0..p).map(FiberPoint::Class).chain([FiberPoint::Infinity]).collect(),
        Some(s) => s
            .split(',')
            .map(|x| parse_qpoint(x.trim().strip_prefix("t=").unwrap_or(x.trim())).map(|a| a.reduction(p)))
            .collect::<Result<_, _>>()?,
    };
    let c = SurfaceCurve::Vertical(p);
    let space = quotient_pairing_space(&d, &c, &omega, &pts, window, ctx)?;
    let n = space.dim();
    r.set("curve", json!(c.label()));
    r.set("points", json!(space.points.iter().map(FiberPoint::label).collect::<Vec<_>>()));
    r.set("orders", json!(space.orders));
    r.set("ord_C(D)", json!(space.n));
    r.set("ord_C(omega)", json!(space.e));
    r.set("dim", json!(n));
    let rank = linalg::rank(&space.matrix, n);
    r.set("rank", json!(rank));
    r.set("matrix", json!(space.matrix.iter().map(|row| row.iter().map(Fp::value).collect::<Vec<_>>()).collect::<Vec<_>>()));
    r.check("nonsingular", space.is_nonsingular(), json!({ "rank": rank, "dim": n }));
    if !space.is_nonsingular() {
        return Ok(());
    }
    let mut bad = Vec::new();
    for k in space.n - 1..=space.n + 1 {
        let dp = adelix_core::surface::SurfaceDivisor::from_terms([(c.clone(), k)]);
        let dual = adelix_core::surface::SurfaceDivisor::from_terms([(c.clone(), space.e - k)]);
        let perp = space.orth_complement(&space.a12_image_left(&dp))?;
        if !linalg::same_subspace(&perp, &space.a12_image_right(&dual), n) {
            bad.push(format!("D' = {k}{}", c.label()));
        }
    }
    let m = space.points.len();
    let shifts: Vec<Vec<i64>> = vec![vec![0; m], (0..m as i64).map(|i| i % 2).collect(), space.orders.clone()];
    for e in &shifts {
        let perp = space.orth_complement(&space.fiber_image_left(e))?;
        if !linalg::same_subspace(&perp, &space.fiber_image_right(e), n) {
            bad.push(format!("fiber divisor {e:?}"));
        }
    }
    r.check("perpendicular_images", bad.is_empty(), json!({ "failures": bad }));
    Ok(())
}
