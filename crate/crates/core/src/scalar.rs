//! Numeric types used for probabilities, weights and rates.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A field used to carry transition labels. Implemented for `f64`, `f32` and
/// exact rationals.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_ratio(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// Shortest decimal text that reads back to the same value (rationals with
    /// a non-terminating expansion fall back to their `f64` approximation).
    fn render(&self) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(n)))
    }
}

impl Scalar for f64 {
    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for f32 {
    fn from_ratio(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        decimal(self).unwrap_or_else(|| format!("{}", Scalar::to_f64(self)))
    }
}

/// Exact decimal expansion when the denominator has no prime factor other
/// than 2 and 5.
fn decimal(r: &BigRational) -> Option<String> {
    if r.is_integer() {
        return Some(r.numer().to_string());
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let ten = BigInt::from(10);
    let mut twos = 0u32;
    let mut fives = 0u32;
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
    let digits = twos.max(fives);
    let scaled = (r.abs() * BigRational::from_integer(num_traits::pow(ten.clone(), digits as usize)))
        .to_integer()
        .to_string();
    let width = digits as usize + 1;
    let padded = format!("{scaled:0>width$}");
    let (int, frac) = padded.split_at(padded.len() - digits as usize);
    let sign = if r.is_negative() { "-" } else { "" };
    Some(format!("{sign}{int}.{frac}"))
}

/// Parses a decimal literal (`12`, `0.25`, `1e-3`, `2.5E2`) exactly.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    let negative = int.starts_with('-');
    let int = int.trim_start_matches(['-', '+']);
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q(4, 5).render(), "0.8");
        assert_eq!(q(1, 1).render(), "1");
        assert_eq!(q(9, 10).render(), "0.9");
        assert_eq!(q(1, 100).render(), "0.01");
        assert_eq!(q(-3, 8).render(), "-0.375");
        assert_eq!(q(8, 9).render(), format!("{}", 8.0f64 / 9.0));
        assert_eq!(0.8f64.render(), "0.8");
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_decimal("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_decimal("4").unwrap(), q(4, 1));
        assert_eq!(parse_decimal("1e-2").unwrap(), q(1, 100));
        assert_eq!(parse_decimal("2.5E1").unwrap(), q(25, 1));
        assert_eq!(parse_decimal("-0.5").unwrap(), q(-1, 2));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal(".").is_none());
    }

    #[test]
    fn conversions() {
        assert_eq!(f64::from_ratio(&q(1, 4)), 0.25);
        assert_eq!(<f32 as Scalar>::from_usize(3), 3.0);
        assert_eq!(Scalar::to_f64(&q(3, 10)), 0.3);
    }
}
