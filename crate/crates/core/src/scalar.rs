//! Coefficient rings for jets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational scalar.
pub type Q = BigRational;

/// Which arithmetic a jet was built with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Float,
    Rational,
    Symbolic,
}

/// A commutative ring usable as a jet coefficient.
///
/// `is_negligible` is the zero test used by the recognition criteria:
/// exact for rationals and symbolic polynomials, relative to `scale` for floats.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    const KIND: ScalarKind;

    fn from_int(n: i64) -> Self;

    /// Largest absolute coefficient magnitude, as a float.
    fn magnitude(&self) -> f64;

    fn is_negligible(&self, scale: f64) -> bool;

    /// Numeric value if the scalar is a plain number.
    fn as_f64(&self) -> Option<f64>;

    /// Sign as -1, 0, 1 under the same zero test; `None` when undecidable (symbolic).
    fn sign(&self, scale: f64) -> Option<i32> {
        if self.is_negligible(scale) {
            return Some(0);
        }
        self.as_f64().map(|v| if v > 0.0 { 1 } else { -1 })
    }
}

/// Relative threshold for float zero tests.
pub const FLOAT_ZERO_RTOL: f64 = 1e-10;

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_ZERO_RTOL * scale.max(f64::MIN_POSITIVE)
    }

    fn as_f64(&self) -> Option<f64> {
        Some(*self)
    }
}

impl Scalar for Q {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn from_int(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn as_f64(&self) -> Option<f64> {
        ToPrimitive::to_f64(self)
    }

    fn sign(&self, _scale: f64) -> Option<i32> {
        Some(q_sign(self))
    }
}

/// Builds an exact rational `num/den`.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational from an integer.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite float.
pub fn q_from_f64(v: f64) -> Option<Q> {
    Q::from_float(v)
}

/// Parses `"p"`, `"p/q"` or a decimal literal such as `"-0.125"` into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp);
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), fp.len());
        return Some(Q::new(n, d));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

/// Sign of a rational as -1, 0, 1.
pub fn q_sign(v: &Q) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_q("3/4"), Some(q(3, 4)));
        assert_eq!(parse_q("-0.125"), Some(q(-1, 8)));
        assert_eq!(parse_q("7"), Some(qi(7)));
        assert_eq!(parse_q(".5"), Some(q(1, 2)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
    }

    #[test]
    fn float_zero_test_is_relative() {
        assert!(1e-12f64.is_negligible(1.0));
        assert!(!1e-12f64.is_negligible(1e-6));
        assert!(!q(1, 1_000_000_000).is_negligible(1e12));
    }
}
