//! Expressions in t: functions like `3/t + 5 + t` and forms like `dt/(2*t)`.
//!
//! Precedence from tight to loose: `^`, unary `-`, `*` `/`, `+` `-`, all
//! binary operators left associative. Exponents are integer literals. A form
//! contains exactly one differential marker, `dt` or `d(expr)`, which may be
//! juxtaposed with the factor before it as in `(1 + t) dt`.

use std::fmt;

use adelix_core::arith::poly::Poly;
use adelix_core::arith::rational::Rational;
use adelix_core::surface::{QFunction, RationalForm};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    /// A decimal literal such as `0.25`.
    Rat(Rational),
    T,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// d(e); `dt` is `D(T)`.
    D(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    T,
    Dt,
    D,
    Op(char),
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                out.push((Tok::Num(src[start..i].to_string()), start));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((Tok::Op(c), i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                match &src[start..i] {
                    "t" => out.push((Tok::T, start)),
                    "dt" => out.push((Tok::Dt, start)),
                    "d" => out.push((Tok::D, start)),
                    w => return err(start, format!("unknown identifier '{w}'")),
                }
            }
            _ => return err(i, format!("unexpected character '{c}'")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op('+')) => BinOp::Add,
                Some(Tok::Op('-')) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op('*')) => BinOp::Mul,
                Some(Tok::Op('/')) => BinOp::Div,
                // juxtaposition with a differential
                Some(Tok::Dt) | Some(Tok::D) => {
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(self.unary()?));
                    continue;
                }
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.eat_op('^') {
            base = Expr::Pow(Box::new(base), self.exponent()?);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let at = self.offset();
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.pos += 1;
        }
        let neg = self.eat_op('-');
        let n = match self.peek().cloned() {
            Some(Tok::Num(s)) if !s.contains('.') => {
                self.pos += 1;
                s.parse::<i64>().or_else(|_| err(at, "exponent out of range"))?
            }
            _ => return err(at, "non-integer exponent"),
        };
        if paren {
            if self.peek() != Some(&Tok::RParen) {
                return err(at, "non-integer exponent");
            }
            self.pos += 1;
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                number(&s, at)
            }
            Some(Tok::T) => {
                self.pos += 1;
                Ok(Expr::T)
            }
            Some(Tok::Dt) => {
                self.pos += 1;
                Ok(Expr::D(Box::new(Expr::T)))
            }
            Some(Tok::D) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::LParen) {
                    return err(self.offset(), "expected '(' after d");
                }
                Ok(Expr::D(Box::new(self.atom()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return err(self.offset(), "expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => err(at, format!("unexpected {}", describe(&t))),
            None => err(at, "unexpected end of input"),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Op(c) => format!("'{c}'"),
        Tok::RParen => "')'".into(),
        _ => "token".into(),
    }
}

fn number(s: &str, at: usize) -> Result<Expr, ParseError> {
    match s.split_once('.') {
        None => Ok(Expr::Int(s.parse().or_else(|_| err(at, "bad integer"))?)),
        Some((int, frac)) => {
            if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
                return err(at, format!("bad number '{s}'"));
            }
            let digits: BigInt = format!("{int}{frac}").parse().or_else(|_| err(at, "bad number"))?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            Ok(Expr::Rat(Rational::new(digits, den)))
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.sum()?;
    if p.pos < p.toks.len() {
        return err(p.offset(), "unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    fn markers(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::Rat(_) | Expr::T => 0,
            Expr::Neg(a) | Expr::Pow(a, _) => a.markers(),
            Expr::Bin(_, a, b) => a.markers() + b.markers(),
            Expr::D(a) => 1 + a.markers(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Renders with the minimal parentheses that parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| {
            if e.prec() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Rat(r) => write!(f, "{}", decimal(r)),
            Expr::T => write!(f, "t"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 3, f)
            }
            Expr::Bin(op, a, b) => {
                let (p, c) = match op {
                    BinOp::Add => (1, '+'),
                    BinOp::Sub => (1, '-'),
                    BinOp::Mul => (2, '*'),
                    BinOp::Div => (2, '/'),
                };
                wrap(a, p, f)?;
                write!(f, " {c} ")?;
                wrap(b, p + 1, f)
            }
            Expr::Pow(a, n) => {
                wrap(a, 5, f)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::D(a) => match **a {
                Expr::T => write!(f, "dt"),
                _ => write!(f, "d({a})"),
            },
        }
    }
}

/// A terminating decimal expansion of r (denominators 2^a 5^b).
fn decimal(r: &Rational) -> String {
    let mut den = r.denom().clone();
    let mut k = 0usize;
    let ten = BigInt::from(10);
    while !(&num_traits::pow(ten.clone(), k) % &den).is_zero() {
        k += 1;
        if k > 64 {
            return format!("({}/{})", r.numer(), r.denom());
        }
    }
    den = num_traits::pow(ten, k);
    let scaled = r.numer() * (&den / r.denom());
    let s = scaled.abs().to_string();
    let s = format!("{s:0>width$}", width = k + 1);
    let (int, frac) = s.split_at(s.len() - k);
    let sign = if scaled.is_negative() { "-" } else { "" };
    if k == 0 {
        format!("{sign}{int}.0")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Function(QFunction),
    Form(QFunction),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Shape(String),
}

fn shape<T>(msg: &str) -> Result<T, EvalError> {
    Err(EvalError::Shape(msg.into()))
}

fn constant(r: Rational) -> QFunction {
    QFunction::constant(r)
}

pub fn eval(e: &Expr) -> Result<Value, EvalError> {
    use Value::*;
    Ok(match e {
        Expr::Int(n) => Function(constant(Rational::from_integer(n.clone()))),
        Expr::Rat(r) => Function(constant(r.clone())),
        Expr::T => Function(QFunction::t(&Rational::zero())),
        Expr::Neg(a) => match eval(a)? {
            Function(f) => Function(f.neg()),
            Form(f) => Form(f.neg()),
        },
        Expr::Pow(a, n) => match eval(a)? {
            Function(f) => Function(f.pow(*n).map_err(|_| EvalError::DivisionByZero)?),
            Form(_) => return shape("a differential cannot be raised to a power"),
        },
        Expr::D(a) => match eval(a)? {
            Function(f) => Form(f.derivative()),
            Form(_) => return shape("d of a differential"),
        },
        Expr::Bin(op, a, b) => match (op, eval(a)?, eval(b)?) {
            (BinOp::Add, Function(x), Function(y)) => Function(x.add(&y)),
            (BinOp::Add, Form(x), Form(y)) => Form(x.add(&y)),
            (BinOp::Sub, Function(x), Function(y)) => Function(x.sub(&y)),
            (BinOp::Sub, Form(x), Form(y)) => Form(x.sub(&y)),
            (BinOp::Add | BinOp::Sub, _, _) => return shape("cannot add a function and a differential"),
            (BinOp::Mul, Function(x), Function(y)) => Function(x.mul(&y)),
            (BinOp::Mul, Function(x), Form(y)) | (BinOp::Mul, Form(y), Function(x)) => Form(x.mul(&y)),
            (BinOp::Mul, Form(_), Form(_)) => return shape("product of two differentials"),
            (BinOp::Div, x, Function(y)) => {
                if y.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                let inv = y.inv().map_err(|_| EvalError::DivisionByZero)?;
                match x {
                    Function(x) => Function(x.mul(&inv)),
                    Form(x) => Form(x.mul(&inv)),
                }
            }
            (BinOp::Div, _, Form(_)) => return shape("division by a differential"),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub fn parse_function(src: &str) -> Result<QFunction, ExprError> {
    let e = parse_expr(src)?;
    if e.markers() > 0 {
        return Err(EvalError::Shape("expected a function, found a differential".into()).into());
    }
    match eval(&e)? {
        Value::Function(f) => Ok(f),
        Value::Form(_) => unreachable!("no differential markers"),
    }
}

pub fn parse_form(src: &str) -> Result<RationalForm, ExprError> {
    let e = parse_expr(src)?;
    if e.markers() != 1 {
        return Err(EvalError::Shape(format!("a form needs exactly one differential, found {}", e.markers())).into());
    }
    match eval(&e)? {
        Value::Form(f) => Ok(RationalForm::new(f)),
        Value::Function(_) => shape("expected a differential form").map_err(Into::into),
    }
}

/// A polynomial in t with rational coefficients.
pub fn parse_poly(src: &str) -> Result<Poly<Rational>, ExprError> {
    let f = parse_function(src)?;
    if f.den().degree() != Some(0) {
        return Err(EvalError::Shape(format!("'{src}' is not a polynomial")).into());
    }
    let c = f.den().coeff(0);
    Ok(f.num().scale(&(Rational::one() / c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use adelix_core::arith::rational::{int, rat};

    #[test]
    fn precedence() {
        let e = parse_expr("-t^2 + 3*t/2").unwrap();
        assert_eq!(e.to_string(), "-t^2 + 3 * t / 2");
        let e = parse_expr("2^-1").unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Int(2.into())), -1));
        assert_eq!(parse_expr("1 - 2 - 3").unwrap().to_string(), "1 - 2 - 3");
        assert_eq!(parse_expr("1 - (2 - 3)").unwrap().to_string(), "1 - (2 - 3)");
        assert_eq!(parse_expr("(-t)^2").unwrap().to_string(), "(-t)^2");
    }

    #[test]
    fn forms() {
        let w = parse_form("dt/(2*t)").unwrap();
        let z = Rational::zero();
        let expect = QFunction::new(Poly::constant(int(1)), Poly::new(z, vec![int(0), int(2)])).unwrap();
        assert_eq!(w.coeff(), &expect);
        let w = parse_form("(3/t+5+t) dt").unwrap();
        assert_eq!(w.coeff().eval(&int(1)).unwrap(), int(9));
        let w = parse_form("d(t^2)").unwrap();
        assert_eq!(w.coeff().eval(&int(3)).unwrap(), int(6));
        assert!(parse_form("t").is_err());
        assert!(parse_form("dt * dt").is_err());
        assert_eq!(parse_function("0.25 * t").unwrap().eval(&int(2)).unwrap(), rat(1, 2));
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_expr("t^(1/2)").unwrap_err();
        assert_eq!((e.offset, e.message.as_str()), (2, "non-integer exponent"));
        assert_eq!(parse_expr("1 + ").unwrap_err().offset, 4);
        assert_eq!(parse_expr("1 + x").unwrap_err().offset, 4);
        assert_eq!(parse_expr("(1 + t").unwrap_err().offset, 6);
        assert!(matches!(parse_function("1/(t - t)"), Err(ExprError::Eval(EvalError::DivisionByZero))));
    }

    #[test]
    fn decimals_render_exactly() {
        assert_eq!(decimal(&rat(1, 4)), "0.25");
        assert_eq!(decimal(&rat(-3, 2)), "-1.5");
        assert_eq!(decimal(&int(7)), "7.0");
        assert_eq!(parse_expr("-1.5").unwrap().to_string(), "-1.5");
    }
}
