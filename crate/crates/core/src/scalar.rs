//! Scalar fields used by every module: exact rationals and `f64`.
//!
//! The scalar mode of a value is its type parameter, so forms of different
//! modes cannot be combined by accident; conversions are explicit.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Relative tolerance used when a float must be treated as zero.
pub const FLOAT_EPS: f64 = 1e-9;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// True for exact arithmetic.
    const EXACT: bool;
    /// Name of the mode as it appears in documents and reports.
    const MODE: &'static str;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Zero test relative to `scale`. Exact scalars ignore the scale.
    fn negligible(&self, scale: f64) -> bool;
    /// The positive real n-th root of a nonnegative value when it is representable.
    fn nth_root(&self, n: u32) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if self.is_negative() || n == 0 {
            return None;
        }
        let num = exact_int_root(self.numer(), n)?;
        let den = exact_int_root(self.denom(), n)?;
        Some(Rational::new(num, den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

fn exact_int_root(v: &BigInt, n: u32) -> Option<BigInt> {
    let r = v.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == *v {
        Some(r)
    } else {
        None
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_EPS * scale.max(1.0)
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if *self < 0.0 || n == 0 {
            None
        } else {
            Some(self.powf(1.0 / n as f64))
        }
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }
}

/// Parse `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::parse_bytes(n.as_bytes(), 10)?;
    let d = BigInt::parse_bytes(d.as_bytes(), 10)?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Canonical text form of a rational: `p/q`, or `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
