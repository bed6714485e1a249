//! Exact rational helpers: parsing, `p/q` rendering and fixed-precision
//! decimal annotations.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Number of significant digits used for human-readable decimal fields.
pub const DECIMAL_DIGITS: usize = 20;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `p/q`, a plain integer, or a terminating decimal such as `-0.25`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    let num: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(num))
}

/// Renders a rational as `p/q`, always with an explicit denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Decimal approximation of a rational, correctly rounded to `sig` significant digits.
pub fn rational_decimal(value: &Rational, sig: usize) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let magnitude = value.abs();
    let estimate = magnitude.to_f64().unwrap_or(f64::MAX);
    let (num, den) = (magnitude.numer().clone(), magnitude.denom().clone());
    let round_scaled = |k: i64| -> BigUint {
        // round(x * 10^k) with half-up rounding
        let (n, d) = if k >= 0 {
            (&num * pow10(k as u32), den.clone())
        } else {
            (num.clone(), &den * pow10((-k) as u32))
        };
        let (q, r) = n.div_rem(&d);
        let q = if r * 2 >= d { q + 1 } else { q };
        q.to_biguint().expect("non-negative")
    };
    render(value.is_negative(), estimate, sig, round_scaled)
}

/// Decimal approximation of `√radicand_square`, i.e. the square root of a
/// non-negative rational, correctly rounded to `sig` significant digits.
pub fn sqrt_decimal(square: &Rational, negative: bool, sig: usize) -> String {
    if square.is_zero() {
        return "0".to_string();
    }
    let estimate = square.to_f64().unwrap_or(f64::MAX).sqrt();
    let (num, den) = (square.numer().clone(), square.denom().clone());
    let round_scaled = |k: i64| -> BigUint {
        // round(sqrt(y)) = floor((isqrt(floor(4y)) + 1) / 2), y = square * 10^(2k)
        let four = BigInt::from(4);
        let (n, d): (BigInt, BigInt) = if k >= 0 {
            (&num * pow10(2 * k as u32) * four, den.clone())
        } else {
            (&num * four, &den * pow10(2 * (-k) as u32))
        };
        let floor = n.div_floor(&d);
        let root = floor.to_biguint().expect("non-negative").sqrt();
        (root + 1u32) / 2u32
    };
    render(negative, estimate, sig, round_scaled)
}

fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), exp as usize)
}

fn render(
    negative: bool,
    estimate: f64,
    sig: usize,
    round_scaled: impl Fn(i64) -> BigUint,
) -> String {
    let sig = sig.max(1);
    let lower = num_traits::pow(BigUint::from(10u32), sig - 1);
    let upper = &lower * 10u32;
    let mut exponent = if estimate.is_finite() && estimate > 0.0 {
        estimate.log10().floor() as i64
    } else {
        0
    };
    let mut mantissa = round_scaled(sig as i64 - 1 - exponent);
    for _ in 0..8 {
        if mantissa >= upper {
            exponent += 1;
        } else if mantissa < lower {
            exponent -= 1;
        } else {
            break;
        }
        mantissa = round_scaled(sig as i64 - 1 - exponent);
    }
    // rounding up to a power of ten can overflow the digit count
    if mantissa >= upper {
        mantissa /= 10u32;
        exponent += 1;
    }
    let digits = mantissa.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-7..21).contains(&exponent) {
        if exponent >= 0 {
            let int_len = exponent as usize + 1;
            if int_len >= digits.len() {
                out.push_str(&digits);
                out.push_str(&"0".repeat(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exponent - 1) as usize));
            out.push_str(&digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push_str(&format!("e{exponent}"));
    }
    out
}

pub fn rational_to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub mod serde_rational {
    //! Serializes exact rationals as `"p/q"` strings.
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::{format_rational, Rational};
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&format_rational(v))?;
            }
            seq.end()
        }
    }
}
