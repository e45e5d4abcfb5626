//! Symbolic differentiation over the polynomial fragment, the mapped
//! derivative `Φ(f'(x))`, and the grid finite difference it is contrasted with.

use num_traits::{One, Zero};

use crate::domain::{lm_add, value_map, BoundaryPolicy, LmValue, NumericContext};
use crate::error::{Error, Result};
use crate::expr::ast::{is_zero, Expr, FuncDef};
use crate::expr::eval::map_function;
use crate::rational::{int, Rational};

/// `f'` with respect to `f`'s parameter. Only `Const`, `Var`, `Neg`, `Add`,
/// `Sub` and `Mul` are accepted.
pub fn derivative_symbolic(f: &FuncDef) -> Result<FuncDef> {
    let body = diff(f.body(), f.param())?;
    Ok(FuncDef::from_parts_unchecked(f.param().to_string(), body))
}

fn diff(e: &Expr, x: &str) -> Result<Expr> {
    Ok(match e {
        Expr::Const(_) => zero(),
        Expr::Var(v) => Expr::Const(if v == x { Rational::one() } else { Rational::zero() }),
        Expr::Neg(a) => neg(diff(a, x)?),
        Expr::Add(a, b) => add(diff(a, x)?, diff(b, x)?),
        Expr::Sub(a, b) => sub(diff(a, x)?, diff(b, x)?),
        Expr::Mul(a, b) => add(mul(diff(a, x)?, (**b).clone()), mul((**a).clone(), diff(b, x)?)),
        Expr::Div(..) => return Err(Error::NonDifferentiableFragment("division")),
        Expr::Abs(_) => return Err(Error::NonDifferentiableFragment("abs")),
        Expr::Min(..) => return Err(Error::NonDifferentiableFragment("min")),
        Expr::Max(..) => return Err(Error::NonDifferentiableFragment("max")),
    })
}

fn zero() -> Expr {
    Expr::Const(Rational::zero())
}

// Smart constructors fold constants so derivatives of nested products stay small.

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        a => Expr::neg(a),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p + q),
        (a, b) if is_zero(&a) => b,
        (a, b) if is_zero(&b) => a,
        (a, b) => Expr::add(a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p - q),
        (a, b) if is_zero(&b) => a,
        (a, b) if is_zero(&a) => neg(b),
        (a, b) => Expr::sub(a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p * q),
        (a, b) if is_zero(&a) || is_zero(&b) => zero(),
        (Expr::Const(p), b) if p.is_one() => b,
        (a, Expr::Const(q)) if q.is_one() => a,
        (a, b) => Expr::mul(a, b),
    }
}

/// `Φ(f'(x))`: the exact derivative, mapped once.
pub fn mapped_derivative(ctx: NumericContext, f: &FuncDef, x: LmValue) -> Result<LmValue> {
    if x.context() != ctx {
        return Err(Error::ContextMismatch { left: ctx.m(), right: x.context().m() });
    }
    let df = derivative_symbolic(f)?;
    let exact = df.apply_classical(&x.to_rational())?;
    Ok(value_map(ctx, &exact))
}

/// `Φ((f^M(x ⊕ 1/M) - f^M(x)) · M)`: forward differencing of the already
/// quantized function. Errors at the upper domain edge, where `x + 1/M`
/// leaves the grid.
pub fn grid_finite_difference(ctx: NumericContext, f: &FuncDef, x: LmValue) -> Result<LmValue> {
    let next = lm_add(BoundaryPolicy::Trap, x, ctx.unit())?;
    let mapped = map_function(ctx, BoundaryPolicy::Saturate, f);
    let hi = mapped.apply(next)?.to_rational();
    let lo = mapped.apply(x)?.to_rational();
    Ok(value_map(ctx, &((hi - lo) * int(ctx.m()))))
}
