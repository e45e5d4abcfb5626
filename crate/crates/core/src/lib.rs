//! Bounded numeric semantics.
//!
//! Values live on the finite grid `N_M = { k/M : |k| <= M^2 }` with
//! `M = 2^b - 1`. Classical expressions are evaluated exactly over the
//! rationals and mapped onto the grid (saturating at `±M`, flooring inside),
//! either once at the end or after every step. Around that core sit
//! cardinality-bounded sets, a Q8.8 fixed-point datapath that traps on
//! overflow, exhaustive algebraic-law checks, and a register VM whose
//! termination is decided by exact cycle detection.

pub mod cli;
pub mod domain;
pub mod error;
pub mod expr;
pub mod laws;
pub mod q88;
pub mod rational;
pub mod sets;
pub mod vm;

pub use domain::{
    enumerate_domain, in_grid, lm_add, lm_mul, map_with_policy, value_map, BoundaryPolicy, LmValue, NumericContext,
};
pub use error::{BoundaryError, CardinalityError, Error, Result};
pub use rational::Rational;
pub use sets::BoundedSet;
