//! Coefficient arithmetic shared by every module.
//!
//! Two arithmetic modes are supported: exact rationals ([`Rational`]) and
//! `f64`. A computation picks one mode up front by instantiating the generic
//! types with the corresponding scalar.

use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational coefficient.
pub type Rational = BigRational;

/// Relative pruning threshold for float coefficients.
pub const FLOAT_PRUNE_REL: f64 = 1e-14;

/// Arithmetic mode tag carried through reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arith {
    Exact,
    Float,
}

impl fmt::Display for Arith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arith::Exact => f.write_str("exact"),
            Arith::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Arith {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "rational" => Ok(Arith::Exact),
            "float" | "f64" => Ok(Arith::Float),
            other => Err(Error::Config(format!("unknown arithmetic mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const MODE: Arith;

    fn from_i64(v: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test used when pruning; `scale` is the largest magnitude in the
    /// enclosing object.
    fn is_negligible(&self, scale: f64) -> bool;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Stable textual form used in JSON reports.
    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for Rational {
    const MODE: Arith = Arith::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

impl Scalar for f64 {
    const MODE: Arith = Arith::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: f64) -> bool {
        *self == 0.0 || self.abs() <= FLOAT_PRUNE_REL * scale
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// `p/q` (or `p` when integral).
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse `{s}` as a rational number"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let den = num::pow(BigInt::from(10), frac_part.len());
    Ok(Rational::new(num, den))
}

pub(crate) fn max_magnitude<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> f64 {
    values.into_iter().map(|v| v.magnitude()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::new((-1).into(), 4.into()));
        assert_eq!(parse_rational("3").unwrap(), Rational::from_i64(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn float_pruning_is_relative() {
        assert!(1e-16f64.is_negligible(1.0));
        assert!(!1e-10f64.is_negligible(1.0));
        assert!(!Rational::ratio(1, 1_000_000_000).is_negligible(1.0));
    }
}
