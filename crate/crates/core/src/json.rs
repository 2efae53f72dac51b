//! Canonical JSON for values reported by the command-line tool.
//!
//! Exact quantities are strings ("-3/4", p-adic digit lists) so they never pass
//! through a float; approximate ones are numbers with an explicit tolerance.

use serde_json::{json, Value};

use crate::arith::fp::Fp;
use crate::arith::laurent::LaurentSeries;
use crate::arith::padic::{PAdic, EXACT};
use crate::arith::rational::{format_rational, Rational};
use crate::arith::scalar::Scalar;
use crate::local2d::{CircleValue, Coefficient, EqCharSeries, MixedSeries, TwoDimLocalElem};

pub trait ToJson {
    fn to_json(&self) -> Value;
}

fn bound(k: i64) -> Value {
    if k >= EXACT / 2 {
        json!("exact")
    } else {
        json!(k)
    }
}

impl ToJson for Rational {
    fn to_json(&self) -> Value {
        json!(format_rational(self))
    }
}

impl ToJson for Fp {
    fn to_json(&self) -> Value {
        json!({ "p": self.p(), "value": self.value() })
    }
}

/// A float converted from an exact value, tagged with its rounding error.
impl ToJson for f64 {
    fn to_json(&self) -> Value {
        json!({ "kind": "approx", "value": self, "tol": self.abs() * f64::EPSILON })
    }
}

impl ToJson for PAdic {
    fn to_json(&self) -> Value {
        if self.is_exact_zero() {
            return json!({ "p": self.p(), "zero": true, "precision": "exact" });
        }
        let mut v = json!({
            "p": self.p(),
            "precision": bound(self.abs_prec()),
            "value": format_rational(&self.to_rational()),
        });
        if self.abs_prec() < EXACT / 2 {
            if let Some(r) = self.reconstruct() {
                v["rational"] = json!(format_rational(&r));
            }
        }
        if let Some(val) = self.valuation() {
            v["valuation"] = json!(val);
        }
        v
    }
}

impl ToJson for CircleValue {
    fn to_json(&self) -> Value {
        match self {
            CircleValue::Exact(r) => json!({ "kind": "exact", "value": format_rational(r) }),
            CircleValue::Approx { x, tol } => json!({ "kind": "approx", "value": x, "tol": tol }),
        }
    }
}

impl ToJson for Coefficient {
    fn to_json(&self) -> Value {
        match self {
            Coefficient::Rational(r) => json!({ "ring": "Q", "value": r.to_json() }),
            Coefficient::Fp(x) => json!({ "ring": "F_p", "value": x.to_json() }),
            Coefficient::Real(x) => json!({ "ring": "R", "value": x.to_json() }),
            Coefficient::PAdic(x) => json!({ "ring": "Q_p", "value": x.to_json() }),
        }
    }
}

impl<C: Scalar + ToJson> ToJson for LaurentSeries<C> {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms().map(|(k, c)| json!([k, c.to_json()])).collect();
        json!({ "prec": bound(self.prec()), "terms": terms })
    }
}

impl ToJson for MixedSeries {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms().map(|(k, c)| json!([k, c.to_json()])).collect();
        json!({
            "p": self.p(),
            "window": { "lo": self.lo(), "hi": bound(self.hi()) },
            "padic_prec": bound(self.prec()),
            "floor": bound(self.floor()),
            "terms": terms,
        })
    }
}

impl ToJson for TwoDimLocalElem {
    fn to_json(&self) -> Value {
        let body = match self {
            TwoDimLocalElem::Mixed(m) => m.to_json(),
            TwoDimLocalElem::EqChar(EqCharSeries::Rational(s)) => s.to_json(),
            TwoDimLocalElem::EqChar(EqCharSeries::Fp(s)) => s.to_json(),
            TwoDimLocalElem::EqChar(EqCharSeries::Real(s)) => s.to_json(),
            TwoDimLocalElem::EqChar(EqCharSeries::PAdic(s)) => s.to_json(),
        };
        json!({ "field": self.kind(), "series": body })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn exact_values_are_strings() {
        let v = CircleValue::exact(rat(-1, 3)).to_json();
        assert_eq!(v, json!({ "kind": "exact", "value": "2/3" }));
        let x = PAdic::from_rational(&rat(1, 2), 2, 8).to_json();
        assert_eq!(x["valuation"], json!(-1));
        assert_eq!(x["value"], json!("1/2"));
        let m = TwoDimLocalElem::Mixed(MixedSeries::monomial(PAdic::from_rational(&rat(1, 2), 2, 8), -1));
        let j = m.to_json();
        assert_eq!(j["field"], json!("Q_p{{u}}"));
        assert_eq!(j["series"]["window"]["hi"], json!("exact"));
    }
}
