//! Number kinds shared by every map: `f64` for the statistical work and
//! `BigRational` as the exact oracle.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberKind {
    Float,
    Exact,
}

/// Absolute tolerance used by float-mode membership checks.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const KIND: NumberKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// `floor(self)` for nonnegative values. `None` for negative, non-finite
    /// or out-of-range inputs.
    fn floor_u64(&self) -> Option<u64>;

    /// Slack allowed when testing `a >= b`.
    fn tolerance() -> Self;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for f64 {
    const KIND: NumberKind = NumberKind::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn floor_u64(&self) -> Option<u64> {
        if !self.is_finite() || *self < 0.0 || *self >= 1.8e19 {
            return None;
        }
        Some(self.floor() as u64)
    }
    fn tolerance() -> Self {
        FLOAT_TOL
    }
}

impl Scalar for BigRational {
    const KIND: NumberKind = NumberKind::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn floor_u64(&self) -> Option<u64> {
        if Signed::is_negative(self) {
            return None;
        }
        let f = self.floor().to_integer();
        BigUint::try_from(f).ok()?.to_u64()
    }
    fn tolerance() -> Self {
        Zero::zero()
    }
}

/// Parse `"7/10"` or `"3"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else if let Some((int, frac)) = s.split_once('.') {
        // Decimal literal read exactly: "0.75" -> 3/4.
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        Some(if neg { -r } else { r })
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Serde helper writing any `Display` value (big integers, rationals,
/// polynomials) as a string.
pub mod as_string {
    use std::fmt::Display;

    use serde::Serializer;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}

/// Like [`as_string`] for sequences.
pub mod as_string_seq {
    use std::fmt::Display;

    use serde::Serializer;

    pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }
}
