//! Probability scalars.
//!
//! Every table in the crate is generic over a [`Probability`] type. `f64` is the
//! workhorse; `f32` is supported for compact tables and [`BigRational`] gives
//! exact arithmetic when enumeration results must be compared without rounding.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Scalar used for probabilities, table entries and expectations.
pub trait Probability: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// Parses a plain decimal literal (`1`, `0.25`, `.5`, `2.5e-3`, `-0.1`).
    fn from_decimal(text: &str) -> Option<Self>;

    /// Lossy conversion used for tolerances, sampling and JSON output.
    fn to_f64(&self) -> f64;

    /// Absolute difference `|self - other|`.
    fn abs_diff(&self, other: &Self) -> Self {
        if *self >= *other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Probability for f64 {
    fn from_decimal(text: &str) -> Option<Self> {
        DecimalParts::parse(text)?;
        text.parse().ok()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    fn from_decimal(text: &str) -> Option<Self> {
        DecimalParts::parse(text)?;
        text.parse().ok()
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Probability for BigRational {
    fn from_decimal(text: &str) -> Option<Self> {
        let parts = DecimalParts::parse(text)?;
        let mut mantissa: BigInt = parts.digits.parse().ok()?;
        if parts.negative {
            mantissa = -mantissa;
        }
        let ten = BigInt::from(10u8);
        let scale = num_traits::pow(ten, parts.exponent.unsigned_abs() as usize);
        Some(if parts.exponent >= 0 {
            BigRational::from_integer(mantissa * scale)
        } else {
            BigRational::new(mantissa, scale)
        })
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// A decimal literal split into `digits × 10^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DecimalParts {
    pub negative: bool,
    pub digits: String,
    pub exponent: i64,
}

impl DecimalParts {
    /// Accepts `[-]digits[.digits][(e|E)[+-]digits]` with at least one mantissa digit.
    pub fn parse(text: &str) -> Option<Self> {
        let (negative, rest) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (mantissa, exp_text) = match rest.find(['e', 'E']) {
            Some(at) => (&rest[..at], Some(&rest[at + 1..])),
            None => (rest, None),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(at) => (&mantissa[..at], &mantissa[at + 1..]),
            None => (mantissa, ""),
        };
        let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !all_digits(int_part) || !all_digits(frac_part) {
            return None;
        }
        let mut exponent: i64 = match exp_text {
            None => 0,
            Some(e) => {
                let unsigned = e.strip_prefix(['+', '-']).unwrap_or(e);
                if unsigned.is_empty() || unsigned.len() > 3 || !all_digits(unsigned) {
                    return None;
                }
                e.parse().ok()?
            }
        };
        exponent -= frac_part.len() as i64;
        let digits = format!("{int_part}{frac_part}");
        Some(Self {
            negative,
            digits,
            exponent,
        })
    }
}

/// Rounds to 12 significant digits, the precision of every serialized probability.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` after rounding to 12 significant digits.
pub fn format_probability(x: f64) -> String {
    let rounded = round_significant(x);
    if rounded == 0.0 {
        return "0".to_string();
    }
    let text = format!("{rounded}");
    // Debug/Display never emit exponents for f64, but tiny values get long.
    if text.len() > 20 {
        let sci = format!("{rounded:e}");
        return sci;
    }
    text
}

/// `|a - b| <= tol`, evaluated in `f64`.
pub fn approx_eq<P: Probability>(a: &P, b: &P, tol: f64) -> bool {
    a.abs_diff(b).to_f64() <= tol
}

/// Sum of a slice of probabilities in slice order.
pub fn sum<P: Probability>(values: &[P]) -> P {
    values.iter().fold(P::zero(), |acc, v| acc + v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_grammar() {
        for ok in ["0", "1", "0.25", ".5", "5.", "2.5e-3", "1E+2", "-0.1"] {
            assert!(DecimalParts::parse(ok).is_some(), "{ok}");
        }
        for bad in ["", ".", "e5", "1e", "0x1", "inf", "NaN", "1.2.3", "--1", "1e1234567"] {
            assert!(DecimalParts::parse(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn rational_parse_is_exact() {
        let r = BigRational::from_decimal("0.1").unwrap();
        assert_eq!(r, BigRational::new(1.into(), 10.into()));
        let r = BigRational::from_decimal("2.5e-3").unwrap();
        assert_eq!(r, BigRational::new(1.into(), 400.into()));
        let r = BigRational::from_decimal("1.5E2").unwrap();
        assert_eq!(r, BigRational::from_integer(150.into()));
        let r = BigRational::from_decimal("-.5").unwrap();
        assert_eq!(r, BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_probability(0.1 + 0.2), "0.3");
        assert_eq!(format_probability(0.71025), "0.71025");
        assert_eq!(format_probability(1.0), "1");
        assert_eq!(format_probability(0.0), "0");
        assert_eq!(format_probability(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_probability(1e-30), "1e-30");
    }

    #[test]
    fn abs_diff_is_symmetric() {
        assert_eq!(0.25f64.abs_diff(&0.75), 0.5);
        assert_eq!(0.75f64.abs_diff(&0.25), 0.5);
        assert!(approx_eq(&0.1f32, &0.1f32, 0.0));
    }
}
