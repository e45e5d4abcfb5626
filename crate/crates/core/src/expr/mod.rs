//! Classical expressions, their bounded evaluation, composition, and
//! derivatives.

mod ast;
mod deriv;
mod eval;
mod parse;

pub use ast::{Expr, FuncDef};
pub use deriv::{derivative_symbolic, grid_finite_difference, mapped_derivative};
pub use eval::{compose, eval_classical, eval_mapped, map_function, Env, EvalMode, GridEnv, MappedFunction};
pub use parse::parse_expr;

/// Parses `body` as a function of `param`.
pub fn parse_function(param: &str, body: &str) -> crate::Result<FuncDef> {
    FuncDef::new(param, parse_expr(body)?)
}
