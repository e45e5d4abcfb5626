use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::domain::{map_with_policy, BoundaryPolicy, LmValue, NumericContext};
use crate::error::{Error, Result};
use crate::expr::ast::{Expr, FuncDef};
use crate::rational::Rational;

/// Where the value map is applied during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EvalMode {
    /// Evaluate the whole expression exactly, then map once at the root.
    #[default]
    SnapAtEnd,
    /// Map after every node. Kept as a contrast mode: it loses associativity
    /// and accumulates quantization error.
    SnapEachStep,
}

pub type Env = HashMap<String, Rational>;
pub type GridEnv = HashMap<String, LmValue>;

/// Exact field semantics over `Q`.
pub fn eval_classical(e: &Expr, env: &Env) -> Result<Rational> {
    Ok(match e {
        Expr::Const(c) => c.clone(),
        Expr::Var(name) => env.get(name).cloned().ok_or_else(|| Error::UnboundVariable(name.clone()))?,
        Expr::Neg(a) => -eval_classical(a, env)?,
        Expr::Add(a, b) => eval_classical(a, env)? + eval_classical(b, env)?,
        Expr::Sub(a, b) => eval_classical(a, env)? - eval_classical(b, env)?,
        Expr::Mul(a, b) => eval_classical(a, env)? * eval_classical(b, env)?,
        Expr::Div(a, b) => {
            let num = eval_classical(a, env)?;
            let den = eval_classical(b, env)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            num / den
        }
        Expr::Abs(a) => eval_classical(a, env)?.abs(),
        Expr::Min(a, b) => eval_classical(a, env)?.min(eval_classical(b, env)?),
        Expr::Max(a, b) => eval_classical(a, env)?.max(eval_classical(b, env)?),
    })
}

fn grid_env_to_rational(ctx: NumericContext, env: &GridEnv) -> Result<Env> {
    env.iter()
        .map(|(name, v)| {
            if v.context() != ctx {
                return Err(Error::ContextMismatch { left: ctx.m(), right: v.context().m() });
            }
            Ok((name.clone(), v.to_rational()))
        })
        .collect()
}

/// Bounded evaluation of `e` with grid-valued bindings.
pub fn eval_mapped(
    ctx: NumericContext,
    policy: BoundaryPolicy,
    mode: EvalMode,
    e: &Expr,
    env: &GridEnv,
) -> Result<LmValue> {
    let env = grid_env_to_rational(ctx, env)?;
    match mode {
        EvalMode::SnapAtEnd => {
            let exact = eval_classical(e, &env)?;
            Ok(map_with_policy(ctx, policy, "expression", &exact)?)
        }
        EvalMode::SnapEachStep => {
            let stepwise = StepEval { ctx, policy, env: &env };
            Ok(stepwise.eval(e)?.0)
        }
    }
}

struct StepEval<'a> {
    ctx: NumericContext,
    policy: BoundaryPolicy,
    env: &'a Env,
}

impl StepEval<'_> {
    /// Returns the mapped value together with its exact rational form, which
    /// is the input to the parent node.
    fn eval(&self, e: &Expr) -> Result<(LmValue, Rational)> {
        let (op, exact) = match e {
            Expr::Const(c) => ("const", c.clone()),
            Expr::Var(name) => {
                ("var", self.env.get(name).cloned().ok_or_else(|| Error::UnboundVariable(name.clone()))?)
            }
            Expr::Neg(a) => ("neg", -self.eval(a)?.1),
            Expr::Abs(a) => ("abs", self.eval(a)?.1.abs()),
            Expr::Add(a, b) => ("add", self.eval(a)?.1 + self.eval(b)?.1),
            Expr::Sub(a, b) => ("sub", self.eval(a)?.1 - self.eval(b)?.1),
            Expr::Mul(a, b) => ("mul", self.eval(a)?.1 * self.eval(b)?.1),
            Expr::Div(a, b) => {
                let num = self.eval(a)?.1;
                let den = self.eval(b)?.1;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                ("div", num / den)
            }
            Expr::Min(a, b) => ("min", self.eval(a)?.1.min(self.eval(b)?.1)),
            Expr::Max(a, b) => ("max", self.eval(a)?.1.max(self.eval(b)?.1)),
        };
        let mapped = map_with_policy(self.ctx, self.policy, op, &exact)?;
        let as_rational = mapped.to_rational();
        Ok((mapped, as_rational))
    }
}

impl FuncDef {
    /// Classical application `f(x)`.
    pub fn apply_classical(&self, x: &Rational) -> Result<Rational> {
        let env: Env = [(self.param().to_string(), x.clone())].into_iter().collect();
        eval_classical(self.body(), &env)
    }
}

/// The mapped function `x ↦ Φ(f(x))` on the grid.
#[derive(Debug, Clone)]
pub struct MappedFunction {
    ctx: NumericContext,
    policy: BoundaryPolicy,
    f: FuncDef,
}

impl MappedFunction {
    pub fn apply(&self, x: LmValue) -> Result<LmValue> {
        if x.context() != self.ctx {
            return Err(Error::ContextMismatch { left: self.ctx.m(), right: x.context().m() });
        }
        let exact = self.f.apply_classical(&x.to_rational())?;
        Ok(map_with_policy(self.ctx, self.policy, "function", &exact)?)
    }

    pub fn definition(&self) -> &FuncDef {
        &self.f
    }
}

pub fn map_function(ctx: NumericContext, policy: BoundaryPolicy, f: &FuncDef) -> MappedFunction {
    MappedFunction { ctx, policy, f: f.clone() }
}

/// Syntactic composition `f ∘ g`: `g`'s body substituted for `f`'s parameter.
/// The result takes `g`'s parameter.
pub fn compose(f: &FuncDef, g: &FuncDef) -> FuncDef {
    let body = f.body().substitute(f.param(), g.body());
    FuncDef::from_parts_unchecked(g.param().to_string(), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::value_map;
    use crate::expr::parse_expr;
    use crate::rational::{int, ratio};

    fn ctx(bits: u32) -> NumericContext {
        NumericContext::new(bits).unwrap()
    }

    fn f(src: &str) -> FuncDef {
        FuncDef::new("x", parse_expr(src).unwrap()).unwrap()
    }

    fn grid_env(c: NumericContext, pairs: &[(&str, i64)]) -> GridEnv {
        pairs.iter().map(|(n, k)| (n.to_string(), c.value(*k).unwrap())).collect()
    }

    #[test]
    fn classical_examples() {
        let env: Env = [("x".to_string(), ratio(1, 2)), ("y".to_string(), ratio(1, 3))].into_iter().collect();
        assert_eq!(eval_classical(&parse_expr("x+y").unwrap(), &env).unwrap(), ratio(5, 6));
        let env: Env = [("x".to_string(), int(7))].into_iter().collect();
        assert_eq!(eval_classical(&parse_expr("x*x - x*x").unwrap(), &env).unwrap(), int(0));
        let env: Env = [("x".to_string(), int(0))].into_iter().collect();
        assert_eq!(eval_classical(&parse_expr("1/x").unwrap(), &env), Err(Error::DivisionByZero));
        assert_eq!(
            eval_classical(&parse_expr("y").unwrap(), &Env::new()),
            Err(Error::UnboundVariable("y".into()))
        );
        let env: Env = [("x".to_string(), int(-2))].into_iter().collect();
        assert_eq!(eval_classical(&parse_expr("min(abs(x), max(x, 1))").unwrap(), &env).unwrap(), int(1));
    }

    #[test]
    fn mapped_modes_diverge_on_saturating_triple() {
        let c = ctx(1);
        let e = parse_expr("(x+y)+z").unwrap();
        let env = grid_env(c, &[("x", 1), ("y", 1), ("z", -1)]);
        let s = BoundaryPolicy::Saturate;
        assert_eq!(eval_mapped(c, s, EvalMode::SnapAtEnd, &e, &env).unwrap().numerator(), 1);
        assert_eq!(eval_mapped(c, s, EvalMode::SnapEachStep, &e, &env).unwrap().numerator(), 0);
    }

    #[test]
    fn mapped_square_quantizes_once() {
        let c = ctx(8);
        let e = parse_expr("x*x").unwrap();
        let env = grid_env(c, &[("x", 76)]);
        let r = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env).unwrap();
        assert_eq!(r.to_string(), "22/255");
    }

    #[test]
    fn trap_policy_in_both_modes() {
        let c = ctx(1);
        let env = grid_env(c, &[("x", 1), ("y", 1), ("z", -1)]);
        let e = parse_expr("(x+y)+z").unwrap();
        // The classical result is in range, so snap-at-end does not trap ...
        assert!(eval_mapped(c, BoundaryPolicy::Trap, EvalMode::SnapAtEnd, &e, &env).is_ok());
        // ... but the intermediate x+y does under snap-each-step.
        let err = eval_mapped(c, BoundaryPolicy::Trap, EvalMode::SnapEachStep, &e, &env).unwrap_err();
        assert_eq!(err.boundary().unwrap().operation, "add");
        let e = parse_expr("x+y").unwrap();
        assert!(eval_mapped(c, BoundaryPolicy::Trap, EvalMode::SnapAtEnd, &e, &env).unwrap_err().boundary().is_some());
    }

    #[test]
    fn each_step_maps_constants() {
        let c = ctx(8);
        let env = grid_env(c, &[("x", 255)]);
        let e = parse_expr("0.3*x").unwrap();
        let end = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env).unwrap();
        let step = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapEachStep, &e, &env).unwrap();
        assert_eq!(end.to_string(), "76/255");
        assert_eq!(step.to_string(), "76/255");
        let e = parse_expr("0.3*x + 0.3*x").unwrap();
        let end = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env).unwrap();
        let step = eval_mapped(c, BoundaryPolicy::Saturate, EvalMode::SnapEachStep, &e, &env).unwrap();
        assert_eq!(end.to_string(), "153/255");
        assert_eq!(step.to_string(), "152/255");
    }

    #[test]
    fn division_by_zero_propagates_in_both_modes() {
        let c = ctx(2);
        let env = grid_env(c, &[("x", 0)]);
        let e = parse_expr("1/x").unwrap();
        for mode in [EvalMode::SnapAtEnd, EvalMode::SnapEachStep] {
            assert_eq!(eval_mapped(c, BoundaryPolicy::Saturate, mode, &e, &env), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn foreign_context_bindings_rejected() {
        let env = grid_env(ctx(1), &[("x", 1)]);
        let e = parse_expr("x").unwrap();
        assert!(matches!(
            eval_mapped(ctx(2), BoundaryPolicy::Saturate, EvalMode::SnapAtEnd, &e, &env),
            Err(Error::ContextMismatch { .. })
        ));
    }

    #[test]
    fn map_function_examples() {
        let c = ctx(2);
        let id = map_function(c, BoundaryPolicy::Saturate, &FuncDef::identity("x"));
        for k in -9..=9 {
            assert_eq!(id.apply(c.value(k).unwrap()).unwrap().numerator(), k);
        }
        let c1 = ctx(1);
        let double = map_function(c1, BoundaryPolicy::Saturate, &f("2*x"));
        assert_eq!(double.apply(c1.unit()).unwrap().numerator(), 1);
        let sq = map_function(c, BoundaryPolicy::Saturate, &f("x*x"));
        assert_eq!(sq.apply(c.value(2).unwrap()).unwrap().numerator(), 1);
        let trapping = map_function(c1, BoundaryPolicy::Trap, &f("2*x"));
        assert!(trapping.apply(c1.unit()).is_err());
    }

    #[test]
    fn compose_examples() {
        let h = compose(&f("x+1"), &f("x*2"));
        assert_eq!(h.apply_classical(&int(3)).unwrap(), int(7));
        let g = f("x*x - 3");
        let id_g = compose(&FuncDef::identity("x"), &g);
        let c = ctx(2);
        for k in -9..=9 {
            let x = c.value(k).unwrap().to_rational();
            assert_eq!(id_g.apply_classical(&x).unwrap(), g.apply_classical(&x).unwrap());
        }
    }

    #[test]
    fn compose_renames_to_inner_parameter() {
        let outer = FuncDef::new("u", parse_expr("u*u").unwrap()).unwrap();
        let inner = FuncDef::new("t", parse_expr("t+1").unwrap()).unwrap();
        let h = compose(&outer, &inner);
        assert_eq!(h.param(), "t");
        assert_eq!(h.apply_classical(&int(2)).unwrap(), int(9));
        let c = ctx(2);
        let mapped = map_function(c, BoundaryPolicy::Saturate, &h);
        assert_eq!(mapped.apply(c.unit()).unwrap(), value_map(c, &ratio(16, 9)));
    }
}
