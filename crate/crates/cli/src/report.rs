//! The report every command produces, its exit code, and both renderings.

use std::fmt::Write as _;

use adelix_core::arith::rational::{format_rational, Rational};
use adelix_core::json::ToJson;
use adelix_core::local2d::CircleValue;
use adelix_core::PrecisionCtx;
use serde_json::{json, Map, Value};

use crate::divisor::DivisorError;
use crate::expr::{ExprError, ParseError};

pub const SCHEMA_VERSION: &str = "1";

/// An approximate real together with the tolerance it is known to.
pub fn approx(x: f64, tol: f64) -> Value {
    json!({ "kind": "approx", "value": x, "tol": tol })
}

pub fn exact(r: &Rational) -> Value {
    json!({ "kind": "exact", "value": format_rational(r) })
}

pub fn circle(v: &CircleValue) -> Value {
    v.to_json()
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(ParseError),
    #[error(transparent)]
    Core(#[from] adelix_core::Error),
    #[error("{0}")]
    Invalid(String),
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse(p) => CliError::Parse(p),
            ExprError::Eval(e) => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<DivisorError> for CliError {
    fn from(e: DivisorError) -> Self {
        match e {
            DivisorError::Syntax(p) => CliError::Parse(p),
            DivisorError::Poly(e) => e.into(),
            DivisorError::Core(e) => CliError::Core(e),
            e @ DivisorError::Place { .. } => CliError::Invalid(e.to_string()),
        }
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        use adelix_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse(_) => "parse",
            CliError::Invalid(_) => "invalid_input",
            CliError::Core(e) => match e {
                E::DivisionByZero => "division_by_zero",
                E::ZeroAtPrecision | E::InsufficientPrecision(_) => "insufficient_precision",
                E::WindowTooSmall { .. } => "window_too_small",
                E::IncompatibleRings(_) => "incompatible_rings",
                E::NotIrreducible(_) => "not_irreducible",
                E::Unsupported(_) => "unsupported",
                E::InvalidInput(_) => "invalid_input",
            },
        }
    }

    fn is_precision(&self) -> bool {
        matches!(self, CliError::Core(e) if e.is_precision() || *e == adelix_core::Error::ZeroAtPrecision)
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Parse(p) => v["offset"] = json!(p.offset),
            CliError::Core(adelix_core::Error::WindowTooSmall { what, needed }) => {
                v["needed"] = json!({ "what": what, "value": needed });
            }
            _ => {}
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub precision: PrecisionCtx,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub error: Option<CliError>,
}

impl Report {
    pub fn new(command: impl Into<String>, args: Vec<String>, precision: PrecisionCtx) -> Self {
        Report {
            command: command.into(),
            args,
            precision,
            results: Map::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            error: None,
        }
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.results.insert(key.into(), v);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: Value) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn status(&self) -> &'static str {
        if self.error.is_some() {
            "error"
        } else if self.checks.iter().any(|c| !c.passed) {
            "check_failed"
        } else {
            "ok"
        }
    }

    /// 0 ok, 1 failed check, 2 usage or input, 3 precision.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) if e.is_precision() => 3,
            Some(_) => 2,
            None if self.checks.iter().any(|c| !c.passed) => 1,
            None => 0,
        }
    }

    pub fn to_json(&self) -> Value {
        let p = &self.precision;
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect();
        let mut v = json!({
            "schema_version": SCHEMA_VERSION,
            "command": { "name": self.command, "args": self.args },
            "precision": {
                "padic_digits": p.padic_digits,
                "v_lo": p.v_lo,
                "v_hi": p.v_hi,
                "arch_tol": p.arch_tol,
            },
            "status": self.status(),
            "results": self.results,
            "checks": checks,
            "notes": self.notes,
        });
        if let Some(e) = &self.error {
            v["error"] = e.to_json();
        }
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}]", self.command, self.status());
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error ({}): {e}", e.kind());
            if let CliError::Core(adelix_core::Error::WindowTooSmall { needed, .. }) = e {
                let _ = writeln!(out, "retry with a window reaching {needed}");
            }
        }
        let width = self.results.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in &self.results {
            let _ = writeln!(out, "  {k:width$}  {}", text_value(v));
        }
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  {mark}  {}  {}", c.name, text_value(&c.detail));
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(m) if m.get("kind").and_then(Value::as_str) == Some("exact") => text_value(&m["value"]),
        Value::Object(m) if m.get("kind").and_then(Value::as_str) == Some("approx") => {
            format!("{} ± {}", m["value"], m["tol"])
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            xs.iter().map(text_value).collect::<Vec<_>>().join(", ")
        }
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use adelix_core::arith::rational::rat;

    #[test]
    fn exit_codes_follow_the_contract() {
        let ctx = PrecisionCtx::default();
        let mut r = Report::new("x", vec![], ctx);
        assert_eq!((r.exit_code(), r.status()), (0, "ok"));
        r.check("c", false, Value::Null);
        assert_eq!((r.exit_code(), r.status()), (1, "check_failed"));
        r.error = Some(CliError::Core(adelix_core::Error::WindowTooSmall { what: "w".into(), needed: 40 }));
        assert_eq!(r.exit_code(), 3);
        assert_eq!(r.to_json()["error"]["needed"]["value"], json!(40));
        r.error = Some(CliError::Usage("u".into()));
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn text_rendering() {
        let mut r = Report::new("residue", vec![], PrecisionCtx::default());
        r.set("residue", exact(&rat(-1, 2)));
        r.set("h0", approx(0.25, 1e-9));
        let s = r.to_text();
        assert!(s.contains("-1/2"), "{s}");
        assert!(s.contains("0.25 ± 1e-9"), "{s}");
    }
}
