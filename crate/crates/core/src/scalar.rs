//! Arithmetic backends shared by distributions and models.
//!
//! Everything probabilistic in this crate is generic over [`Scalar`], which is
//! implemented for `f64` (search, fitting, quantum evaluation) and for
//! [`Rational`] (certificates, determinization). Float comparisons honour a
//! tolerance; rational comparisons are exact and ignore it.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn as_f64(&self) -> f64;

    /// Converts a float. For rationals the conversion is exact (every finite
    /// `f64` is a dyadic rational); non-finite input maps to zero.
    fn from_real(x: f64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// Equality up to `eps` for floats, exact equality for rationals.
    fn approx_eq(&self, other: &Self, eps: f64) -> bool;

    /// `self` is zero up to `eps` (exactly zero for rationals).
    fn is_negligible(&self, eps: f64) -> bool {
        self.approx_eq(&Self::zero(), eps)
    }

    /// `self > 0` beyond `eps` (strictly positive for rationals).
    fn is_positive_beyond(&self, eps: f64) -> bool {
        if Self::EXACT {
            self.is_positive()
        } else {
            self.as_f64() > eps
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn as_f64(&self) -> f64 {
        *self
    }

    fn from_real(x: f64) -> Self {
        x
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        (self - other).abs() <= eps
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_real(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).unwrap_or_else(Rational::zero)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx_eq(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }
}

/// Parses `"3"`, `"-1/3"` or a finite decimal such as `"0.125"` into an exact
/// rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let mut num = BigInt::from_str_radix(&digits, 10).ok()?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Some(Rational::new(num, den));
    }
    BigInt::from_str(text).ok().map(Rational::from_integer)
}

/// Renders a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Sum of a slice of scalars.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc + v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3"), Some(Rational::from_ratio(1, 3)));
        assert_eq!(parse_rational("0.125"), Some(Rational::from_ratio(1, 8)));
        assert_eq!(parse_rational("-2.5"), Some(Rational::from_ratio(-5, 2)));
        assert_eq!(parse_rational("7"), Some(Rational::from_ratio(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1."), None);
    }

    #[test]
    fn float_to_rational_is_exact() {
        let r = Rational::from_real(0.1);
        assert_eq!(r.as_f64(), 0.1);
        assert_ne!(r, Rational::from_ratio(1, 10));
    }

    #[test]
    fn rational_comparisons_ignore_eps() {
        let a = Rational::from_ratio(1, 3);
        let b = Rational::from_ratio(1, 3) + Rational::from_ratio(1, 1_000_000_000_000);
        assert!(!a.approx_eq(&b, 1.0));
        assert!(1.0f64.approx_eq(&(1.0 + 1e-12), 1e-9));
    }

    #[test]
    fn formats_rationals() {
        assert_eq!(format_rational(&Rational::from_ratio(2, 6)), "1/3");
        assert_eq!(format_rational(&Rational::from_ratio(4, 2)), "2");
    }
}
