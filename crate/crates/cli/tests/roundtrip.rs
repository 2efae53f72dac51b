use adelix_cli::expr::{parse_expr, BinOp, Expr};
use adelix_core::arith::rational::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|n| Expr::Int(n.into())),
        (0u32..10_000, 1u32..4).prop_map(|(n, k)| Expr::Rat(Rational::new(n.into(), BigInt::from(10).pow(k)))),
        Just(Expr::T),
        Just(Expr::D(Box::new(Expr::T))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
            (inner.clone(), -6i64..7).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
            inner.prop_map(|e| Expr::D(Box::new(e))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn render_then_parse_is_identity(e in expr()) {
        let s = e.to_string();
        let back = parse_expr(&s).map_err(|err| TestCaseError::fail(format!("{s}: {err}")))?;
        prop_assert_eq!(back, e, "{}", s);
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^() t0-9.d]{0,24}") {
        let _ = parse_expr(&s);
    }
}
