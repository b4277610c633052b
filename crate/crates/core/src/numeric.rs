//! Exact-when-possible scalar values.
//!
//! Points, tables and metrics are rational. Transcendental functions (cos,
//! fractional powers, logarithms) demote a [`Value`] to `f64`; once
//! approximate, a value stays approximate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// Tolerance used when two approximate values are compared for a tie.
pub const FLOAT_TIE_TOL: f64 = 1e-12;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `base^(-exp)` as an exact rational.
pub fn inv_pow(base: u64, exp: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(base), exp as usize))
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Signed representative of `r` modulo 1 in `(-1/2, 1/2]`.
pub fn signed_mod1(r: &Rational) -> Rational {
    let f = frac(r);
    let half = rat(1, 2);
    if f > half {
        f - Rational::one()
    } else {
        f
    }
}

/// Circle distance `min(|x - y|, 1 - |x - y|)`.
pub fn circle_dist(x: &Rational, y: &Rational) -> Rational {
    signed_mod1(&(x - y)).abs()
}

/// Rational upper bound of `x`, with denominator `10^9`.
pub fn rational_upper(x: f64) -> Rational {
    let scale = 1_000_000_000f64;
    let n = (x * scale).ceil();
    Rational::new(BigInt::from(n as i128), BigInt::from(1_000_000_000i64))
}

/// Rational lower bound of `x` with denominator `10^9`.
pub fn rational_lower(x: f64) -> Rational {
    -rational_upper(-x)
}

/// Parses `"p/q"`, `"p"`, or a decimal such as `"-0.125"` / `"1e-3"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{whole}{fraction}");
    let numer: BigInt = joined.parse().map_err(|_| bad())?;
    let scale = exponent - fraction.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Canonical `"p/q"` rendering (`"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A real number carried exactly as a rational until something forces a float.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Value::Exact(Rational::one())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Approx(x) => Value::Approx(x.abs()),
        }
    }

    /// `self^alpha` for `self >= 0`; exact only when `alpha == 1`.
    pub fn pow_alpha(&self, alpha: f64) -> Self {
        if alpha == 1.0 {
            self.clone()
        } else {
            Value::Approx(self.to_f64().max(0.0).powf(alpha))
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Equality for tie detection: exact when both sides are exact, otherwise
    /// within [`FLOAT_TIE_TOL`] (relative to magnitude, floored at 1).
    pub fn ties_with(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= FLOAT_TIE_TOL * a.abs().max(b.abs()).max(1.0)
            }
        }
    }

    /// Canonical string: `"p/q"` when exact, shortest round-trip float otherwise.
    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) => format_rational(r),
            Value::Approx(x) => format!("{x:?}"),
        }
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Exact(r)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Approx(x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! value_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Value> for &'a Value {
            type Output = Value;
            fn $method(self, rhs: &'a Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(a), Value::Exact(b)) => Value::Exact(a.$method(b)),
                    _ => Value::Approx(self.to_f64().$method(rhs.to_f64())),
                }
            }
        }
        impl $trait<Value> for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Value> for Value {
            type Output = Value;
            fn $method(self, rhs: &'a Value) -> Value {
                (&self).$method(rhs)
            }
        }
    };
}

value_binop!(Add, add);
value_binop!(Sub, sub);
value_binop!(Mul, mul);

impl<'a> Div<&'a Value> for &'a Value {
    type Output = Value;
    fn div(self, rhs: &'a Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) if !b.is_zero() => Value::Exact(a / b),
            _ => Value::Approx(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div<Value> for Value {
    type Output = Value;
    fn div(self, rhs: Value) -> Value {
        (&self).div(&rhs)
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(-r),
            Value::Approx(x) => Value::Approx(-x),
        }
    }
}

impl std::iter::Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, v| acc + v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_exponent_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&int(-3)), "-3");
    }

    #[test]
    fn circle_distance_wraps() {
        assert_eq!(circle_dist(&rat(1, 7), &rat(4, 7)), rat(3, 7));
        assert_eq!(circle_dist(&rat(1, 10), &rat(9, 10)), rat(1, 5));
        assert_eq!(circle_dist(&rat(1, 3), &rat(1, 3)), int(0));
    }

    #[test]
    fn exactness_is_sticky_only_when_floats_enter() {
        let a = Value::Exact(rat(1, 3));
        let b = Value::Exact(rat(2, 3));
        assert!((&a + &b).is_exact());
        let c = a.clone() + Value::Approx(0.5);
        assert!(!c.is_exact());
        assert!(Value::Exact(rat(1, 2)).ties_with(&Value::Approx(0.5)));
        assert!(!a.ties_with(&b));
    }
}
