use crate::arith::fp::Fp;
use crate::arith::laurent::LaurentSeries;
use crate::arith::padic::PAdic;
use crate::arith::rational::Rational;
use crate::arith::scalar::rational_to_f64;
use crate::error::{Error, Result};
use crate::local2d::circle::{lambda_fp, lambda_inf, lambda_p, CircleValue};
use crate::local2d::mixed::MixedSeries;

/// Equal-characteristic series `k((t))` over one of the supported coefficient fields.
#[derive(Clone, Debug, PartialEq)]
pub enum EqCharSeries {
    Rational(LaurentSeries<Rational>),
    Fp(LaurentSeries<Fp>),
    Real(LaurentSeries<f64>),
    /// Q_p((t)): the shape of a horizontal flag over a finite prime.
    PAdic(LaurentSeries<PAdic>),
}

/// Element of a two-dimensional local field (or of R((t)) at an archimedean pair).
#[derive(Clone, Debug, PartialEq)]
pub enum TwoDimLocalElem {
    EqChar(EqCharSeries),
    Mixed(MixedSeries),
}

/// A coefficient returned by a residue map.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Rational(Rational),
    Fp(Fp),
    Real(f64),
    PAdic(PAdic),
}

/// `f dt` where `f` lives in a local field with parameter `param`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm {
    pub coeff: TwoDimLocalElem,
    pub param: String,
}

impl DifferentialForm {
    pub fn new(coeff: TwoDimLocalElem, param: impl Into<String>) -> Self {
        DifferentialForm { coeff, param: param.into() }
    }
}

impl TwoDimLocalElem {
    pub fn kind(&self) -> &'static str {
        match self {
            TwoDimLocalElem::EqChar(EqCharSeries::Rational(_)) => "Q((t))",
            TwoDimLocalElem::EqChar(EqCharSeries::Fp(_)) => "F_p((t))",
            TwoDimLocalElem::EqChar(EqCharSeries::Real(_)) => "R((t))",
            TwoDimLocalElem::EqChar(EqCharSeries::PAdic(_)) => "Q_p((t))",
            TwoDimLocalElem::Mixed(_) => "Q_p{{u}}",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TwoDimLocalElem::EqChar(s) => match s {
                EqCharSeries::Rational(x) => x.is_zero(),
                EqCharSeries::Fp(x) => x.is_zero(),
                EqCharSeries::Real(x) => x.is_zero(),
                EqCharSeries::PAdic(x) => x.is_zero(),
            },
            TwoDimLocalElem::Mixed(m) => m.is_zero(),
        }
    }

    fn mismatch(&self, o: &Self) -> Error {
        Error::IncompatibleRings(format!("{} and {}", self.kind(), o.kind()))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        use EqCharSeries as E;
        use TwoDimLocalElem as T;
        Ok(match (self, o) {
            (T::EqChar(E::Rational(a)), T::EqChar(E::Rational(b))) => T::EqChar(E::Rational(a.add(b))),
            (T::EqChar(E::Fp(a)), T::EqChar(E::Fp(b))) => T::EqChar(E::Fp(a.try_add(b)?)),
            (T::EqChar(E::Real(a)), T::EqChar(E::Real(b))) => T::EqChar(E::Real(a.add(b))),
            (T::EqChar(E::PAdic(a)), T::EqChar(E::PAdic(b))) => T::EqChar(E::PAdic(a.try_add(b)?)),
            (T::Mixed(a), T::Mixed(b)) => T::Mixed(a.try_add(b)?),
            _ => return Err(self.mismatch(o)),
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        use EqCharSeries as E;
        use TwoDimLocalElem as T;
        Ok(match (self, o) {
            (T::EqChar(E::Rational(a)), T::EqChar(E::Rational(b))) => T::EqChar(E::Rational(a.mul(b))),
            (T::EqChar(E::Fp(a)), T::EqChar(E::Fp(b))) => T::EqChar(E::Fp(a.try_mul(b)?)),
            (T::EqChar(E::Real(a)), T::EqChar(E::Real(b))) => T::EqChar(E::Real(a.mul(b))),
            (T::EqChar(E::PAdic(a)), T::EqChar(E::PAdic(b))) => T::EqChar(E::PAdic(a.try_mul(b)?)),
            (T::Mixed(a), T::Mixed(b)) => T::Mixed(a.try_mul(b)?),
            _ => return Err(self.mismatch(o)),
        })
    }

    pub fn neg(&self) -> Self {
        use EqCharSeries as E;
        use TwoDimLocalElem as T;
        match self {
            T::EqChar(E::Rational(a)) => T::EqChar(E::Rational(a.neg())),
            T::EqChar(E::Fp(a)) => T::EqChar(E::Fp(a.neg())),
            T::EqChar(E::Real(a)) => T::EqChar(E::Real(a.neg())),
            T::EqChar(E::PAdic(a)) => T::EqChar(E::PAdic(a.neg())),
            T::Mixed(a) => T::Mixed(a.neg()),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }
}

fn window_err(e: Error) -> Error {
    match e {
        Error::InsufficientPrecision(m) => {
            Error::InsufficientPrecision(format!("residue needs the coefficient of t^-1: {m}"))
        }
        other => other,
    }
}

/// Residue of an equal-characteristic form: the coefficient of `t^-1`.
pub fn res_eqchar(w: &DifferentialForm) -> Result<Coefficient> {
    let TwoDimLocalElem::EqChar(s) = &w.coeff else {
        return Err(Error::invalid("res_eqchar expects an equal-characteristic form"));
    };
    Ok(match s {
        EqCharSeries::Rational(f) => Coefficient::Rational(f.coeff_at(-1).map_err(window_err)?),
        EqCharSeries::Fp(f) => Coefficient::Fp(f.coeff_at(-1).map_err(window_err)?),
        EqCharSeries::Real(f) => Coefficient::Real(f.coeff_at(-1).map_err(window_err)?),
        EqCharSeries::PAdic(f) => Coefficient::PAdic(f.coeff_at(-1).map_err(window_err)?),
    })
}

/// Residue of a mixed-characteristic form: minus the coefficient of `u^-1`.
pub fn res_mixed(w: &DifferentialForm) -> Result<PAdic> {
    let TwoDimLocalElem::Mixed(m) = &w.coeff else {
        return Err(Error::invalid("res_mixed expects a mixed-characteristic form"));
    };
    use crate::arith::scalar::Scalar;
    Ok(m.coeff_at(-1).map_err(window_err)?.negated())
}

/// Residue followed by the canonical character of the underlying place.
///
/// Q_p{{u}} and Q_p((t)) use `lambda_p`, R((t)) uses `lambda_inf`, and F_p((t))
/// uses `x -> x/p`. A form over Q((t)) has no place attached and is rejected.
pub fn res_flag(w: &DifferentialForm, arch_tol: f64) -> Result<CircleValue> {
    match &w.coeff {
        TwoDimLocalElem::Mixed(_) => lambda_p(&res_mixed(w)?),
        TwoDimLocalElem::EqChar(_) => match res_eqchar(w)? {
            Coefficient::PAdic(x) => lambda_p(&x),
            Coefficient::Real(x) => Ok(lambda_inf(x, arch_tol)),
            Coefficient::Fp(x) => Ok(lambda_fp(&x)),
            Coefficient::Rational(_) => Err(Error::Unsupported(
                "Q((t)) carries no place; embed it into Q_p((t)) or R((t)) first".into(),
            )),
        },
    }
}

/// Re-expands an element in the parameter `t' = phi(t)`.
pub fn substitute_parameter(x: &TwoDimLocalElem, phi: &TwoDimLocalElem, cap: i64) -> Result<TwoDimLocalElem> {
    use EqCharSeries as E;
    use TwoDimLocalElem as T;
    Ok(match (x, phi) {
        (T::EqChar(E::Rational(a)), T::EqChar(E::Rational(f))) => T::EqChar(E::Rational(a.substitute_parameter(f, cap)?)),
        (T::EqChar(E::Fp(a)), T::EqChar(E::Fp(f))) => T::EqChar(E::Fp(a.substitute_parameter(f, cap)?)),
        (T::EqChar(E::Real(a)), T::EqChar(E::Real(f))) => T::EqChar(E::Real(a.substitute_parameter(f, cap)?)),
        (T::EqChar(E::PAdic(a)), T::EqChar(E::PAdic(f))) => T::EqChar(E::PAdic(a.substitute_parameter(f, cap)?)),
        (T::Mixed(a), T::EqChar(E::PAdic(f))) => T::Mixed(a.substitute_parameter(f, cap)?),
        _ => return Err(x.mismatch(phi)),
    })
}

/// Re-expands a form `f dt` in the parameter `t' = phi(t)`: `f(psi(t')) psi'(t') dt'`.
pub fn substitute_form(w: &DifferentialForm, phi: &TwoDimLocalElem, new_param: &str, cap: i64) -> Result<DifferentialForm> {
    use EqCharSeries as E;
    use TwoDimLocalElem as T;
    let coeff = match (&w.coeff, phi) {
        (T::EqChar(E::Rational(a)), T::EqChar(E::Rational(f))) => {
            let psi = f.reversion(cap + 1)?;
            T::EqChar(E::Rational(a.compose(&psi, cap + 1)?.mul(&psi.derivative()).truncate(cap)))
        }
        (T::EqChar(E::Fp(a)), T::EqChar(E::Fp(f))) => {
            let psi = f.reversion(cap + 1)?;
            T::EqChar(E::Fp(a.compose(&psi, cap + 1)?.mul(&psi.derivative()).truncate(cap)))
        }
        (T::EqChar(E::PAdic(a)), T::EqChar(E::PAdic(f))) => {
            let psi = f.reversion(cap + 1)?;
            T::EqChar(E::PAdic(a.compose(&psi, cap + 1)?.mul(&psi.derivative()).truncate(cap)))
        }
        (T::Mixed(a), T::EqChar(E::PAdic(f))) => {
            let psi = crate::local2d::mixed::integral_reversion(f, cap + 1)?;
            let body = a.compose_integral(&psi, cap + 1)?;
            let d = psi.derivative();
            let terms: Vec<(i64, PAdic)> = d.terms().map(|(k, c)| (k, c.clone())).collect();
            let dm = MixedSeries::from_terms(a.p(), &terms, d.prec());
            T::Mixed(body.mul(&dm).truncate(cap, body.prec()))
        }
        _ => return Err(w.coeff.mismatch(phi)),
    };
    Ok(DifferentialForm::new(coeff, new_param))
}

/// The completed tensor product Q((t)) -> R((t)): coefficient-wise embedding.
pub fn complete_tensor_real(f: &LaurentSeries<Rational>) -> LaurentSeries<f64> {
    f.map(&0.0, rational_to_f64)
}
