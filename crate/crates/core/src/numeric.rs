//! Probability values in one of two arithmetic modes.
//!
//! Polytope questions (admissibility, classical membership) are answered in
//! exact rational arithmetic. Softmax coordinates involve exponentials and
//! live in `f64`. A [`Value`] carries either; mixing the two promotes to float.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default tolerance for float-mode admissibility and gluing checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Rational(Rational),
    Float(f64),
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or(Error::NonFinite(x))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match r.to_f64() {
        Some(x) => x,
        None => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
    }
}

/// Parses `"p"`, `"p/q"` or a decimal literal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::BadNumber(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(n));
    }
    // plain decimal, no exponent
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (ip, fp) = body.split_once('.').ok_or_else(bad)?;
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
    let n = BigInt::from_str(&digits).map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), fp.len());
    let r = Rational::new(n, d);
    Ok(if neg { -r } else { r })
}

/// Decimal rendering with 12 significant digits.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded = round12(x);
    let m = rounded.abs();
    if m != 0.0 && !(1e-6..1e16).contains(&m) {
        format!("{:e}", rounded)
    } else {
        format!("{}", rounded)
    }
}

/// Rounds to 12 significant digits, for report output.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

impl Value {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Rational => Value::Rational(Rational::zero()),
            Mode::Float => Value::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Rational => Value::Rational(Rational::one()),
            Mode::Float => Value::Float(1.0),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Value::Rational(_) => Mode::Rational,
            Value::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Rational(r) => rational_to_f64(r),
            Value::Float(x) => *x,
        }
    }

    /// Exact rational; floats are decomposed bit-exactly.
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Value::Rational(r) => Ok(r.clone()),
            Value::Float(x) => rational_from_f64(*x),
        }
    }

    pub fn to_mode(&self, mode: Mode) -> Result<Value> {
        Ok(match mode {
            Mode::Rational => Value::Rational(self.to_rational()?),
            Mode::Float => Value::Float(self.to_f64()),
        })
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Value::Rational(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Rational(r) => r.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Rational(r) => r.is_negative(),
            Value::Float(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Rational(r) => Value::Rational(r.abs()),
            Value::Float(x) => Value::Float(x.abs()),
        }
    }

    fn binary(
        &self,
        other: &Value,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        float: impl Fn(f64, f64) -> f64,
    ) -> Value {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(exact(a, b)),
            _ => Value::Float(float(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        self.binary(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.binary(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &Value) -> Value {
        self.binary(other, |a, b| a * b, |a, b| a * b)
    }

    /// Division; exact division by zero falls back to float (inf/nan).
    pub fn div(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) if !b.is_zero() => Value::Rational(a / b),
            _ => Value::Float(self.to_f64() / other.to_f64()),
        }
    }

    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }

    pub fn max(self, other: Value) -> Value {
        match self.compare(&other) {
            Some(Ordering::Less) => other,
            _ => self,
        }
    }

    pub fn parse(s: &str, mode: Mode) -> Result<Value> {
        match mode {
            Mode::Rational => parse_rational(s).map(Value::Rational),
            Mode::Float => {
                if let Ok(x) = s.trim().parse::<f64>() {
                    Ok(Value::Float(x))
                } else {
                    parse_rational(s).map(|r| Value::Float(rational_to_f64(&r)))
                }
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(r) => write!(f, "{}", r),
            Value::Float(x) => f.write_str(&format_float(*x)),
        }
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Rational(r)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn float_decomposition_is_exact() {
        assert_eq!(rational_from_f64(0.5).unwrap(), rat(1, 2));
        let third = rational_from_f64(1.0 / 3.0).unwrap();
        assert_ne!(third, rat(1, 3));
        assert_eq!(rational_to_f64(&third), 1.0 / 3.0);
        assert!(rational_from_f64(f64::NAN).is_err());
    }

    #[test]
    fn mixed_arithmetic_promotes_to_float() {
        let a = Value::Rational(rat(1, 2));
        let b = Value::Float(0.25);
        assert_eq!(a.add(&b), Value::Float(0.75));
        assert_eq!(a.add(&a), Value::Rational(int(1)));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(5f64.sqrt()), "2.2360679775");
        assert_eq!(format_float(0.5), "0.5");
        assert!(format_float(2e-12).contains('e'));
        assert_eq!(Value::Rational(rat(2, 4)).to_string(), "1/2");
    }
}
