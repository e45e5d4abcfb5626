//! Q8.8 signed fixed point with trap-on-boundary arithmetic.
//!
//! Values are 16-bit two's-complement integers read as `raw / 256`. Addition
//! widens to `i32` and range-checks; multiplication forms the 32-bit product,
//! rescales by 8 bits and range-checks. There is no wrapping and no
//! saturation: leaving `[-32768, 32767]` is a [`Q88Trap`].

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::rational::{format_terminating_decimal, int, Rational};

pub const FRAC_BITS: u32 = 8;
pub const SCALE: i32 = 1 << FRAC_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Q88(i16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RoundingMode {
    /// Arithmetic shift right: floor toward -inf.
    #[default]
    Truncate,
    /// Round half away from zero before the shift.
    SymmetricRound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("Q8.8 trap in {operation}: rescaled value {wide} outside [-32768, 32767]")]
pub struct Q88Trap {
    pub operation: &'static str,
    /// The out-of-range raw value, in units of 1/256.
    pub wide: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Q88Op {
    Add,
    Mul,
}

impl Q88 {
    pub const ZERO: Q88 = Q88(0);
    pub const ONE: Q88 = Q88(SCALE as i16);
    pub const MIN: Q88 = Q88(i16::MIN);
    pub const MAX: Q88 = Q88(i16::MAX);

    pub const fn from_raw(raw: i16) -> Self {
        Self(raw)
    }

    pub const fn raw(self) -> i16 {
        self.0
    }

    /// `floor(256 x)`, trapping outside the 16-bit range.
    pub fn from_rational(x: &Rational) -> Result<Self, Q88Trap> {
        let scaled = (x * int(SCALE as i64)).floor().to_integer();
        let wide = scaled.to_i64().unwrap_or(if scaled.is_negative() { i64::MIN } else { i64::MAX });
        check("convert", wide)
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.0), BigInt::from(SCALE))
    }

    /// True if `x` is a multiple of 1/256 (conversion would not floor).
    pub fn is_exact(x: &Rational) -> bool {
        (x * int(SCALE as i64)).is_integer()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Q88) -> Result<Q88, Q88Trap> {
        let wide = self.0 as i32 + other.0 as i32;
        check("add", wide as i64)
    }

    pub fn mul(self, other: Q88, mode: RoundingMode) -> Result<Q88, Q88Trap> {
        let p = self.0 as i32 * other.0 as i32;
        let half = SCALE / 2;
        let r = match mode {
            RoundingMode::Truncate => p >> FRAC_BITS,
            RoundingMode::SymmetricRound if p >= 0 => (p + half) >> FRAC_BITS,
            RoundingMode::SymmetricRound => -((-p + half) >> FRAC_BITS),
        };
        check("mul", r as i64)
    }

    pub fn apply(self, op: Q88Op, other: Q88, mode: RoundingMode) -> Result<Q88, Q88Trap> {
        match op {
            Q88Op::Add => self.add(other),
            Q88Op::Mul => self.mul(other, mode),
        }
    }
}

fn check(operation: &'static str, wide: i64) -> Result<Q88, Q88Trap> {
    i16::try_from(wide).map(Q88).map_err(|_| Q88Trap { operation, wide })
}

/// Renders as exact decimal plus raw word, e.g. `3.75 (raw 960)`.
impl fmt::Display for Q88 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dec = format_terminating_decimal(&self.to_rational()).expect("1/256 steps terminate");
        write!(f, "{dec} (raw {})", self.0)
    }
}

impl Q88 {
    /// Exact decimal alone, e.g. `3.75`.
    pub fn decimal(self) -> String {
        format_terminating_decimal(&self.to_rational()).expect("1/256 steps terminate")
    }
}

/// Compares a Q8.8 operation against the rational reference: compute the
/// exact result, quantize it by the mode's rule, range-check it. True iff the
/// fixed-point datapath agrees on both the value and the trap decision.
pub fn oracle_check(x: Q88, y: Q88, op: Q88Op, mode: RoundingMode) -> bool {
    let reference = oracle(x, y, op, mode);
    let actual = x.apply(op, y, mode).map(Q88::raw).map_err(|t| t.wide);
    reference == actual
}

/// Reference outcome: `Ok(raw)` or `Err(out_of_range_raw)`.
pub fn oracle(x: Q88, y: Q88, op: Q88Op, mode: RoundingMode) -> Result<i16, i64> {
    let exact = match op {
        Q88Op::Add => x.to_rational() + y.to_rational(),
        Q88Op::Mul => x.to_rational() * y.to_rational(),
    };
    let scaled = exact * int(SCALE as i64);
    let quantized = match (op, mode) {
        (Q88Op::Add, _) | (Q88Op::Mul, RoundingMode::Truncate) => scaled.floor(),
        (Q88Op::Mul, RoundingMode::SymmetricRound) => {
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let magnitude = (scaled.abs() + half).floor();
            if scaled.is_negative() {
                -magnitude
            } else {
                magnitude
            }
        }
    };
    let wide = quantized.to_integer().to_i64().expect("products of 16-bit words fit i64");
    i16::try_from(wide).map_err(|_| wide)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn q(num: i64, den: i64) -> Q88 {
        Q88::from_rational(&ratio(num, den)).unwrap()
    }

    #[test]
    fn conversion_examples() {
        assert_eq!(q(3, 2).raw(), 384);
        assert_eq!(q(0, 1).raw(), 0);
        assert_eq!(Q88::from_rational(&int(200)), Err(Q88Trap { operation: "convert", wide: 51200 }));
        assert_eq!(Q88::from_rational(&int(-128)).unwrap(), Q88::MIN);
        assert!(Q88::from_rational(&ratio(-25601, 200)).is_err());
        // floor on non-representable input
        assert_eq!(q(1, 1000).raw(), 0);
        assert_eq!(q(-1, 1000).raw(), -1);
    }

    #[test]
    fn add_examples() {
        assert_eq!(q(3, 2).add(q(9, 4)).unwrap().raw(), 960);
        let x = q(-77, 7);
        assert_eq!(x.add(Q88::ZERO).unwrap(), x);
        assert_eq!(q(100, 1).add(q(100, 1)), Err(Q88Trap { operation: "add", wide: 51200 }));
        assert!(Q88::MIN.add(Q88::from_raw(-1)).is_err());
    }

    #[test]
    fn mul_examples() {
        assert_eq!(q(3, 2).mul(q(2, 1), RoundingMode::Truncate).unwrap().raw(), 768);
        let tiny = Q88::from_raw(1);
        let half = Q88::from_raw(128);
        assert_eq!(tiny.mul(half, RoundingMode::Truncate).unwrap().raw(), 0);
        assert_eq!(tiny.mul(half, RoundingMode::SymmetricRound).unwrap().raw(), 1);
        assert_eq!(Q88::from_raw(-1).mul(half, RoundingMode::SymmetricRound).unwrap().raw(), -1);
        assert_eq!(Q88::from_raw(-1).mul(tiny, RoundingMode::Truncate).unwrap().raw(), -1);
        assert_eq!(
            q(127, 1).mul(q(2, 1), RoundingMode::Truncate),
            Err(Q88Trap { operation: "mul", wide: 65024 })
        );
    }

    #[test]
    fn rendering() {
        assert_eq!(q(15, 4).to_string(), "3.75 (raw 960)");
        assert_eq!(q(3, 1).to_string(), "3.0 (raw 768)");
        assert_eq!(Q88::from_raw(1).to_string(), "0.00390625 (raw 1)");
        assert_eq!(Q88::MIN.decimal(), "-128.0");
        assert_eq!(Q88::MAX.decimal(), "127.99609375");
    }

    #[test]
    fn oracle_directed_cases() {
        let one = Q88::ONE;
        for raw in [i16::MIN, -300, -1, 0, 1, 255, 256, i16::MAX] {
            let x = Q88::from_raw(raw);
            assert_eq!(x.mul(one, RoundingMode::Truncate).unwrap(), x);
            for mode in [RoundingMode::Truncate, RoundingMode::SymmetricRound] {
                assert!(oracle_check(x, one, Q88Op::Mul, mode));
                assert!(oracle_check(x, x, Q88Op::Mul, mode));
                assert!(oracle_check(x, x, Q88Op::Add, mode));
            }
        }
        assert_eq!(oracle(Q88::from_raw(-1), Q88::from_raw(1), Q88Op::Mul, RoundingMode::Truncate), Ok(-1));
    }
}
