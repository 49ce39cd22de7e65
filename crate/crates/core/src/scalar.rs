//! Numeric modes: binary floating point or exact rationals.
//!
//! Graphon functionals and bounds are generic over [`Scalar`]. Rational inputs
//! keep reproductions of exact values exact; `f64` is used for random property
//! sweeps and anything involving irrational square roots.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance used for floating comparisons of densities and symmetric entries.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact image of a finite double (NaN and infinities map to zero in
    /// exact mode).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Square root, or `None` when it is not representable (irrational
    /// values in exact mode, negative input in either mode).
    fn sqrt(&self) -> Option<Self>;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Equality for exact types, `|a - b| <= tol` for floats.
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).abs().to_f64() <= tol
        }
    }

    /// Parse a decimal (`0.36`, `1e-3`) or fraction (`9/25`) literal.
    fn parse(s: &str) -> Result<Self>;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powi(&self, e: u32) -> Self {
        match i32::try_from(e) {
            Ok(e) => f64::powi(*self, e),
            Err(_) => f64::powf(*self, e as f64),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            Ok(rational_to_f64(&parse_rational(s)?))
        } else {
            f64::from_str(s).map_err(|_| Error::Parse(s.to_string()))
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(n.to_string())),
            Value::String(s) => <f64 as Scalar>::parse(s),
            other => Err(Error::Parse(other.to_string())),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_default()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Rational::new(n, d))
    }

    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse(other.to_string())),
        }
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Nearest-double conversion that survives numerators and denominators
/// beyond the `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down to ~1000 bits before converting.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 1000).max(0);
    let shift_d = (db - 1000).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Parse `p/q`, an integer, or a finite decimal literal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return Err(err());
    } else {
        digits
    };
    let num = BigInt::from_str(&digits).map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Exact rational equal to the given double.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    <Rational as FromPrimitive>::from_f64(x).ok_or_else(|| Error::Parse(x.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(q("9/25"), q("0.36"));
        assert_eq!(q("-1/40"), q("-0.025"));
        assert_eq!(q("1e-3"), Rational::new(1.into(), 1000.into()));
        assert_eq!(q("3"), Rational::from_integer(3.into()));
        assert_eq!(q("2.5E1"), Rational::from_integer(25.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Scalar::sqrt(&q("9/25")), Some(q("3/5")));
        assert_eq!(Scalar::sqrt(&q("1/2")), None);
        assert_eq!(Scalar::sqrt(&q("-1/4")), None);
        assert_eq!(Scalar::sqrt(&0.25f64), Some(0.5));
    }

    #[test]
    fn json_forms() {
        assert_eq!(q("6/8").to_json(), Value::String("3/4".into()));
        assert_eq!(
            Rational::from_json(&Value::String("3/4".into())).unwrap(),
            q("3/4")
        );
        assert_eq!(
            <f64 as Scalar>::from_json(&serde_json::json!(0.5)).unwrap(),
            0.5
        );
        assert_eq!(
            <f64 as Scalar>::from_json(&serde_json::json!("1/4")).unwrap(),
            0.25
        );
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = Rational::new(big.clone() * 3, big);
        assert_eq!(rational_to_f64(&r), 3.0);
    }

    #[test]
    fn generic_powi() {
        assert_eq!(Scalar::powi(&q("2/3"), 3), q("8/27"));
        assert_eq!(Scalar::powi(&q("2/3"), 0), q("1"));
        assert_eq!(Scalar::powi(&1.5f64, 2), 2.25);
    }
}
