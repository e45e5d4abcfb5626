use std::fmt;

use thiserror::Error;

use crate::rational::{format_rational, Rational};

/// A classical value fell outside `[-M, M]` while the trap policy was active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryError {
    pub operation: &'static str,
    pub value: Rational,
    pub bound: i64,
}

impl fmt::Display for BoundaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "boundary violation in {}: classical value {} exceeds bound {}",
            self.operation,
            format_rational(&self.value),
            self.bound
        )
    }
}

impl std::error::Error for BoundaryError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cardinality bound exceeded: {attempted} elements requested, capacity {capacity}")]
pub struct CardinalityError {
    pub attempted: u64,
    pub capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bit parameter must satisfy 1 <= b <= {max}, got {bits}")]
    InvalidBits { bits: u32, max: u32 },
    #[error("numerator {k} outside the domain bound +/-{limit}")]
    NumeratorOutOfRange { k: i128, limit: i64 },
    #[error("values from different contexts (M={left} and M={right})")]
    ContextMismatch { left: i64, right: i64 },
    #[error("{what} has {size} elements, above the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Cardinality(#[from] CardinalityError),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("function body refers to `{found}` but its parameter is `{param}`")]
    FreeVariable { param: String, found: String },
    #[error("`{0}` is outside the differentiable polynomial fragment")]
    NonDifferentiableFragment(&'static str),
    #[error("step budget of {0} exhausted before a decision")]
    BudgetExhausted(u64),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn boundary(&self) -> Option<&BoundaryError> {
        match self {
            Error::Boundary(b) => Some(b),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
