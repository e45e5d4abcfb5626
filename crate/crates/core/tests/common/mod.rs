//! Helpers shared by the integration tests: an independent polynomial model
//! used as an oracle for composition and differentiation.

#![allow(dead_code)]

use lm_core::expr::{Expr, FuncDef};
use lm_core::rational::int;
use lm_core::{NumericContext, Rational};
use rand::Rng;

/// Coefficients, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(int(0), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    /// Sum of monomials `c * x * x * ...`, deliberately not Horner form so the
    /// tree shape differs from [`Poly::eval`].
    pub fn to_expr(&self, var: &str) -> Expr {
        let mut terms = self.0.iter().enumerate().map(|(i, c)| {
            (0..i).fold(Expr::constant(c.clone()), |acc, _| Expr::mul(acc, Expr::var(var)))
        });
        let first = terms.next().unwrap_or_else(|| Expr::constant(int(0)));
        terms.fold(first, Expr::add)
    }

    pub fn to_func(&self, var: &str) -> FuncDef {
        FuncDef::new(var, self.to_expr(var)).unwrap()
    }
}

/// A polynomial of degree at most `max_degree` whose coefficients are grid
/// points of `ctx`, restricted to numerators in `-reach..=reach`.
pub fn random_grid_poly(rng: &mut impl Rng, ctx: NumericContext, max_degree: usize, reach: i64) -> Poly {
    let degree = rng.gen_range(0..=max_degree);
    Poly((0..=degree).map(|_| ctx.value(rng.gen_range(-reach..=reach)).unwrap().to_rational()).collect())
}
