//! Exact rational helpers. Classical (pre-mapping) values are always
//! [`BigRational`], so every floor taken by the value map is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Floor of `x` as an `i128`, or `None` if it does not fit.
pub fn floor_i128(x: &Rational) -> Option<i128> {
    x.floor().to_integer().to_i128()
}

/// Canonical `p/q` rendering (lowest terms, positive denominator, `q` always shown).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses an exact rational literal: an integer (`-7`), a decimal (`0.3`,
/// `-12.625`) or a fraction (`3/10`, `-3/10`). Decimals are taken exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational literal `{text}`"));
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = parse_digits(p).ok_or_else(bad)?;
        let q = parse_digits(q).ok_or_else(bad)?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Rational::new(p, q)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let whole = if whole.is_empty() { BigInt::zero() } else { parse_digits(whole).ok_or_else(bad)? };
        let frac_digits = if frac.is_empty() { BigInt::zero() } else { parse_digits(frac).ok_or_else(bad)? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Rational::new(whole * &scale + frac_digits, scale)
    } else {
        Rational::from_integer(parse_digits(body).ok_or_else(bad)?)
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Exact decimal rendering for rationals whose denominator divides a power of
/// ten (e.g. Q8.8 values). Always shows at least one fractional digit.
pub fn format_terminating_decimal(x: &Rational) -> Option<String> {
    let mut den = x.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let digits = twos.max(fives).max(1);
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x.abs() * Rational::from_integer(scale.clone())).to_integer();
    let whole = &scaled / &scale;
    let frac = (&scaled % &scale).to_string();
    let mut frac = format!("{}{}", "0".repeat(digits - frac.len()), frac);
    while frac.len() > 1 && frac.ends_with('0') {
        frac.pop();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    Some(format!("{sign}{whole}.{frac}"))
}
