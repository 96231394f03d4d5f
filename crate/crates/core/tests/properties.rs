//! Property tests for the expression engine: randomized bounded-depth
//! trees, checked against evaluation and finite differences.

use hlift_core::{max_residual, EquivConfig, Expr, Point, SamplingDomain};
use proptest::prelude::*;

fn leaf() -> BoxedStrategy<Expr> {
    prop_oneof![
        (-4i32..=4).prop_map(|c| Expr::constant(c as f64)),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
    ]
    .boxed()
}

fn expr_tree(depth: u32) -> BoxedStrategy<Expr> {
    leaf()
        .prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                inner.clone().prop_map(|a| a.sin()),
                inner.clone().prop_map(|a| a.cos()),
                inner.prop_map(|a| -a),
            ]
        })
        .boxed()
}

fn point(x: f64, y: f64) -> Point {
    let mut p = Point::new();
    p.set("x", x);
    p.set("y", y);
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simplify_preserves_evaluation(e in expr_tree(5), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let p = point(x, y);
        let before = e.evaluate(&p).unwrap();
        let after = e.simplify().evaluate(&p).unwrap();
        let scale = 1.0 + before.abs().max(after.abs());
        prop_assert!(((before - after) / scale).abs() <= 1e-9,
            "{before} vs {after} for {e}");
    }

    #[test]
    fn differentiation_is_linear(a in expr_tree(4), b in expr_tree(4), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let p = point(x, y);
        let lhs = (a.clone() + b.clone()).differentiate("x").evaluate(&p).unwrap();
        let rhs = a.differentiate("x").evaluate(&p).unwrap()
            + b.differentiate("x").evaluate(&p).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!(((lhs - rhs) / scale).abs() <= 1e-9);
    }

    #[test]
    fn derivative_matches_central_difference(e in expr_tree(4), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let h = 1e-5;
        let d = e.differentiate("x").evaluate(&point(x, y)).unwrap();
        let plus = e.evaluate(&point(x + h, y)).unwrap();
        let minus = e.evaluate(&point(x - h, y)).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        let scale = 1.0 + d.abs().max(fd.abs());
        prop_assert!(((d - fd) / scale).abs() <= 1e-5, "{d} vs {fd} for {e}");
    }

    #[test]
    fn residual_is_deterministic(e in expr_tree(4)) {
        let mut dom = SamplingDomain::new();
        dom.insert("x", -2.0, 2.0).unwrap();
        dom.insert("y", -2.0, 2.0).unwrap();
        let cfg = EquivConfig { seed: 7, ..EquivConfig::default() };
        let a = max_residual(&e, &e.simplify(), &dom, &cfg).unwrap();
        let b = max_residual(&e, &e.simplify(), &dom, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn substitution_then_evaluation_commutes(e in expr_tree(4), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        // replace y by a concrete expression, then evaluate
        let mut map = std::collections::BTreeMap::new();
        map.insert("y".to_string(), Expr::var("x") + Expr::constant(0.5));
        let substituted = e.substitute(&map).evaluate(&point(x, y)).unwrap();
        let direct = e.evaluate(&point(x, x + 0.5)).unwrap();
        let scale = 1.0 + substituted.abs().max(direct.abs());
        prop_assert!(((substituted - direct) / scale).abs() <= 1e-9);
    }
}
