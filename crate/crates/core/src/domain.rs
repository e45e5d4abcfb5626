//! The bounded numeric grid `N_M = { k/M : -M^2 <= k <= M^2 }`, the value map
//! onto it, and grid arithmetic under an explicit boundary policy.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{BoundaryError, Error, Result};
use crate::rational::{floor_i128, int, Rational};

/// Largest accepted bit parameter. With `b <= 31`, `M^2 < 2^62` fits an `i64`
/// numerator and `M^3 < 2^93` keeps the product path inside `i128`.
pub const MAX_BITS: u32 = 31;

/// Default limit on the number of values an exhaustive enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumericContext {
    bits: u32,
    m: i64,
}

impl NumericContext {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::InvalidBits { bits, max: MAX_BITS });
        }
        Ok(Self { bits, m: (1i64 << bits) - 1 })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The bound `M = 2^b - 1`: largest magnitude, and the inverse of the grid unit.
    pub fn m(&self) -> i64 {
        self.m
    }

    /// `M^2`, the largest numerator and also the set capacity.
    pub fn m_squared(&self) -> i64 {
        self.m * self.m
    }

    /// Number of grid points, `2 M^2 + 1`.
    pub fn domain_len(&self) -> u64 {
        2 * self.m_squared() as u64 + 1
    }

    pub fn value(&self, k: i64) -> Result<LmValue> {
        LmValue::new(*self, k)
    }

    pub fn zero(&self) -> LmValue {
        LmValue { k: 0, ctx: *self }
    }

    /// The grid point `M` itself (numerator `M^2`).
    pub fn max_value(&self) -> LmValue {
        LmValue { k: self.m_squared(), ctx: *self }
    }

    pub fn min_value(&self) -> LmValue {
        LmValue { k: -self.m_squared(), ctx: *self }
    }

    /// The grid unit `1/M`.
    pub fn unit(&self) -> LmValue {
        LmValue { k: 1, ctx: *self }
    }

    fn bound(&self) -> Rational {
        int(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryPolicy {
    /// Out-of-range values clamp to `±M`.
    #[default]
    Saturate,
    /// Out-of-range values raise a [`BoundaryError`]. In-range values are
    /// still floored onto the grid.
    Trap,
}

/// A grid point `k/M`. Ordering compares numerators; values of different
/// contexts should not be compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LmValue {
    k: i64,
    ctx: NumericContext,
}

impl LmValue {
    pub fn new(ctx: NumericContext, k: i64) -> Result<Self> {
        let limit = ctx.m_squared();
        if k.unsigned_abs() > limit as u64 {
            return Err(Error::NumeratorOutOfRange { k: k as i128, limit });
        }
        Ok(Self { k, ctx })
    }

    pub fn numerator(&self) -> i64 {
        self.k
    }

    pub fn context(&self) -> NumericContext {
        self.ctx
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.k), BigInt::from(self.ctx.m))
    }

    fn same_context(&self, other: &LmValue) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch { left: self.ctx.m, right: other.ctx.m });
        }
        Ok(())
    }
}

impl fmt::Display for LmValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.k, self.ctx.m)
    }
}

/// Parses the canonical `k/M` rendering back into a value of `ctx`.
pub fn parse_value(ctx: NumericContext, text: &str) -> Result<LmValue> {
    let bad = || Error::Parse(format!("expected `k/{}`, got `{text}`", ctx.m));
    let (k, m) = text.trim().split_once('/').ok_or_else(bad)?;
    let k: i64 = k.parse().map_err(|_| bad())?;
    let m: i64 = m.parse().map_err(|_| bad())?;
    if m != ctx.m {
        return Err(bad());
    }
    LmValue::new(ctx, k)
}

/// The value map: saturate at `±M`, otherwise floor onto the grid.
pub fn value_map(ctx: NumericContext, x: &Rational) -> LmValue {
    let bound = ctx.bound();
    let k = if *x >= bound {
        ctx.m_squared()
    } else if *x <= -bound {
        -ctx.m_squared()
    } else {
        let scaled = x * int(ctx.m);
        // |M x| < M^2, so the floor fits.
        floor_i128(&scaled).expect("in-range floor fits i128") as i64
    };
    LmValue { k, ctx }
}

/// Applies `policy` to a classical value: the value map under `Saturate`, and
/// under `Trap` an error whenever `|x| > M`. The boundary `±M` itself is
/// representable and never traps.
pub fn map_with_policy(
    ctx: NumericContext,
    policy: BoundaryPolicy,
    operation: &'static str,
    x: &Rational,
) -> Result<LmValue, BoundaryError> {
    if policy == BoundaryPolicy::Trap && x.abs() > ctx.bound() {
        return Err(BoundaryError { operation, value: x.clone(), bound: ctx.m });
    }
    Ok(value_map(ctx, x))
}

/// `x ⊕ y`. Sums of grid points stay on the grid, so only saturation applies.
pub fn lm_add(policy: BoundaryPolicy, x: LmValue, y: LmValue) -> Result<LmValue> {
    x.same_context(&y)?;
    let ctx = x.ctx;
    let limit = ctx.m_squared() as i128;
    let sum = x.k as i128 + y.k as i128;
    if sum.abs() > limit {
        if policy == BoundaryPolicy::Trap {
            return Err(BoundaryError {
                operation: "add",
                value: Rational::new(BigInt::from(sum), BigInt::from(ctx.m)),
                bound: ctx.m,
            }
            .into());
        }
        return Ok(LmValue { k: limit.min(sum.max(-limit)) as i64, ctx });
    }
    Ok(LmValue { k: sum as i64, ctx })
}

/// `x ⊗ y`. The exact product is `k1 k2 / M^2`, so the mapped numerator is
/// `floor(k1 k2 / M)` when in range.
pub fn lm_mul(policy: BoundaryPolicy, x: LmValue, y: LmValue) -> Result<LmValue> {
    x.same_context(&y)?;
    let ctx = x.ctx;
    let m = ctx.m as i128;
    let m_cubed = m * m * m;
    let product = x.k as i128 * y.k as i128;
    if product.abs() > m_cubed && policy == BoundaryPolicy::Trap {
        return Err(BoundaryError {
            operation: "mul",
            value: Rational::new(BigInt::from(product), BigInt::from(m * m)),
            bound: ctx.m,
        }
        .into());
    }
    let k = if product >= m_cubed {
        ctx.m_squared()
    } else if product <= -m_cubed {
        -ctx.m_squared()
    } else {
        product.div_euclid(m) as i64
    };
    Ok(LmValue { k, ctx })
}

/// True iff `x ∈ N_M`: `M x` is an integer and `|x| <= M`.
pub fn in_grid(ctx: NumericContext, x: &Rational) -> bool {
    (x * int(ctx.m)).is_integer() && x.abs() <= ctx.bound()
}

/// Converts `x` to a grid value if it lies on the grid.
pub fn grid_value(ctx: NumericContext, x: &Rational) -> Option<LmValue> {
    if !in_grid(ctx, x) {
        return None;
    }
    let k = (x * int(ctx.m)).to_integer().to_i64()?;
    Some(LmValue { k, ctx })
}

/// Every grid point in ascending order, refusing domains larger than `cap`.
pub fn enumerate_domain(ctx: NumericContext, cap: u64) -> Result<Vec<LmValue>> {
    let len = ctx.domain_len();
    if len > cap {
        return Err(Error::CapExceeded { what: "domain", size: len as u128, cap: cap as u128 });
    }
    let limit = ctx.m_squared();
    Ok((-limit..=limit).map(|k| LmValue { k, ctx }).collect())
}
