mod common;

use common::{random_grid_poly, Poly};
use lm_core::domain::{enumerate_domain, grid_value};
use lm_core::expr::{
    compose, derivative_symbolic, eval_classical, eval_mapped, grid_finite_difference, map_function,
    mapped_derivative, parse_expr, Env, EvalMode, Expr, FuncDef, GridEnv,
};
use lm_core::rational::{int, ratio};
use lm_core::{value_map, BoundaryPolicy, Error, NumericContext, Rational};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn ctx(bits: u32) -> NumericContext {
    NumericContext::new(bits).unwrap()
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=8).prop_map(|(n, d)| ratio(n, d))
}

/// Expressions over `x` and `y` using every node kind.
fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        small_rational().prop_map(Expr::constant),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::abs),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::min(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::max(a, b)),
        ]
    })
}

/// One-variable fragment expressions (no division) in `x`.
fn unary_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-6i64..=6, 1i64..=3).prop_map(|(n, d)| Expr::constant(ratio(n, d))),
        Just(Expr::var("x")),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::abs),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::min(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::max(a, b)),
        ]
    })
}

fn grid_env(c: NumericContext, kx: i64, ky: i64) -> GridEnv {
    [("x".to_string(), c.value(kx).unwrap()), ("y".to_string(), c.value(ky).unwrap())].into_iter().collect()
}

fn exact_env(g: &GridEnv) -> Env {
    g.iter().map(|(n, v)| (n.clone(), v.to_rational())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snap_at_end_matches_classical_on_grid(e in expr_tree(), b in 1u32..=4, kx in -225i64..=225, ky in -225i64..=225) {
        let c = ctx(b);
        let l = c.m_squared();
        let env = grid_env(c, kx.clamp(-l, l), ky.clamp(-l, l));
        match eval_classical(&e, &exact_env(&env)) {
            Ok(exact) => {
                let mapped = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env).unwrap();
                prop_assert_eq!(mapped, value_map(c, &exact));
                if let Some(v) = grid_value(c, &exact) {
                    prop_assert_eq!(mapped, v);
                }
            }
            Err(Error::DivisionByZero) => {
                let r = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env);
                prop_assert!(matches!(r, Err(Error::DivisionByZero)));
            }
            Err(other) => prop_assert!(false, "unexpected {other}"),
        }
    }

    #[test]
    fn printed_expressions_reparse(e in expr_tree()) {
        let printed = e.to_string();
        prop_assert_eq!(parse_expr(&printed).unwrap(), e);
    }

    /// Composition associativity under snap-at-end, exhaustive over the M=3 grid.
    #[test]
    fn composition_is_associative(f in unary_tree(), g in unary_tree(), h in unary_tree()) {
        let c = ctx(2);
        let (f, g, h) = (FuncDef::new("x", f).unwrap(), FuncDef::new("x", g).unwrap(), FuncDef::new("x", h).unwrap());
        let left = map_function(c, BoundaryPolicy::Saturate, &compose(&compose(&f, &g), &h));
        let right = map_function(c, BoundaryPolicy::Saturate, &compose(&f, &compose(&g, &h)));
        for x in enumerate_domain(c, 100).unwrap() {
            prop_assert_eq!(left.apply(x).unwrap(), right.apply(x).unwrap());
        }
    }

    /// Symbolic derivative against coefficient-wise differentiation.
    #[test]
    fn symbolic_derivative_matches_coefficient_oracle(
        coeffs in prop::collection::vec(small_rational(), 1..7),
        points in prop::collection::vec(small_rational(), 1..6),
    ) {
        let p = Poly(coeffs);
        let df = derivative_symbolic(&p.to_func("x")).unwrap();
        let oracle = p.derivative();
        for x in points {
            prop_assert_eq!(df.apply_classical(&x).unwrap(), oracle.eval(&x));
        }
    }

    #[test]
    fn linear_mapped_derivative_is_constant(cn in -2000i64..=2000, cd in 1i64..=100, b in 1u32..=8, k in any::<i64>()) {
        let c = ctx(b);
        let slope = ratio(cn, cd);
        let f = FuncDef::new("x", Expr::mul(Expr::constant(slope.clone()), Expr::var("x"))).unwrap();
        let x = c.value(k.rem_euclid(2 * c.m_squared() + 1) - c.m_squared()).unwrap();
        prop_assert_eq!(mapped_derivative(c, &f, x).unwrap(), value_map(c, &slope));
    }
}

#[test]
fn modes_diverge_for_every_small_m() {
    let e = parse_expr("(x+y)+z").unwrap();
    for b in 1..=3 {
        let c = ctx(b);
        let l = c.m_squared();
        let env: GridEnv = [("x", l), ("y", l), ("z", -l)]
            .into_iter()
            .map(|(n, k)| (n.to_string(), c.value(k).unwrap()))
            .collect();
        let end = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env).unwrap();
        let step = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapEachStep, &e, &env).unwrap();
        assert_eq!(end, c.max_value(), "M={}", c.m());
        assert_eq!(step, c.zero(), "M={}", c.m());
    }
}

#[test]
fn snap_each_step_traps_on_intermediate_overflow() {
    let c = ctx(1);
    let e = parse_expr("(x+y)+z").unwrap();
    let env: GridEnv =
        [("x", 1), ("y", 1), ("z", -1)].into_iter().map(|(n, k)| (n.to_string(), c.value(k).unwrap())).collect();
    assert_eq!(eval_mapped(c, BoundaryPolicy::Trap, EvalMode::SnapAtEnd, &e, &env).unwrap(), c.max_value());
    let err = eval_mapped(c, BoundaryPolicy::Trap, EvalMode::SnapEachStep, &e, &env).unwrap_err();
    assert_eq!(err.boundary().unwrap().value, int(2));
}

#[test]
fn naive_difference_of_point_three_x_has_interior_zeros() {
    let c = ctx(8);
    let f = FuncDef::new("x", parse_expr("0.3*x").unwrap()).unwrap();
    let zeros = (1..c.m_squared() - 1)
        .step_by(97)
        .filter(|&k| grid_finite_difference(c, &f, c.value(k).unwrap()).unwrap() == c.zero())
        .count();
    assert!(zeros > 0);
}

#[test]
fn random_grid_polynomials_compose_like_the_oracle() {
    let c = ctx(2);
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let (f, g) = (random_grid_poly(&mut rng, c, 3, 9), random_grid_poly(&mut rng, c, 3, 9));
        let fg = map_function(c, BoundaryPolicy::Saturate, &compose(&f.to_func("x"), &g.to_func("x")));
        for x in enumerate_domain(c, 100).unwrap() {
            let exact = f.eval(&g.eval(&x.to_rational()));
            assert_eq!(fg.apply(x).unwrap(), value_map(c, &exact));
        }
    }
}
