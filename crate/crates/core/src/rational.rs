//! Exact rational scalars and the textual format used in every JSON file.
//!
//! Rationals are written as `"p/q"` (or a bare integer when `q = 1`) and may
//! be read from `"p/q"`, integers, or plain decimals such as `"0.125"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a rational (expected \"p/q\", an integer or a decimal)")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(x: &Rational) -> f64 {
    ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"-7"`, or `"0.25"` into an exact rational.
pub fn parse(input: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError {
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() {
            return Err(err());
        }
        if !digits.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let mut all = String::with_capacity(digits.len() + frac.len());
        all.push_str(digits);
        all.push_str(frac);
        let mantissa: BigInt = if all.is_empty() {
            BigInt::zero()
        } else {
            all.parse().map_err(|_| err())?
        };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mantissa, den);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Display adapter producing the same text as [`format`].
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self.0))
    }
}

/// Prints a float with `digits` significant digits in plain decimal notation.
pub fn significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        if trimmed == "-0" {
            "0".to_string()
        } else {
            trimmed.to_string()
        }
    } else {
        s
    }
}

/// Scalars that tables and inequality formulas are generic over: `f64` for
/// Born-rule data and [`Rational`] for exact data from trivial POVMs.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + num_traits::Num
    + Signed
    + for<'a> std::ops::AddAssign<&'a Self>
{
    fn from_rational(x: &Rational) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_rational(x: &Rational) -> Self {
        to_f64(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_rational(x: &Rational) -> Self {
        x.clone()
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
}

/// Least common multiple of the denominators, for clearing a rational row.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()))
}

pub fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}

/// Serde helpers writing rationals in the `"p/q"` text form.
pub mod serde_text {
    use super::{format, Rational};
    use serde::Serializer;

    pub fn one<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn option<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_str(&format(x)),
            None => s.serialize_none(),
        }
    }

    pub fn many<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_accepted_forms() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert_eq!(parse("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.2.3").is_err());
    }

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(format(&ratio(10, 2)), "5");
        assert_eq!(format(&ratio(21, 2)), "21/2");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(significant(2.236_067_977_499_79, 6), "2.23607");
        assert_eq!(significant(0.908123456, 6), "0.908123");
        assert_eq!(significant(1.0, 12), "1");
        assert_eq!(significant(0.0, 6), "0");
        assert_eq!(significant(1234567.0, 3), "1234567");
    }
}
