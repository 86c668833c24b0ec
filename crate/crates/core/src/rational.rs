//! Exact rational helpers.
//!
//! Every solution-bearing quantity in this crate is a [`Rational`]. Values are
//! always normalized by `num-rational`, so equality is structural.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn parse(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| {
            if v.denom().is_one() || acc == *v.denom() {
                acc
            } else {
                acc.lcm(v.denom())
            }
        })
}

pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Rounds to `places` decimals using round-half-to-even on the exact value.
pub fn round_half_even(value: &Rational, places: u32) -> Rational {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = value * Rational::from_integer(scale.clone());
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = ratio(1, 2);
    let mut rounded = floor.to_integer();
    if frac > half || (frac == half && rounded.is_odd()) {
        rounded += 1;
    }
    Rational::new(rounded, scale)
}

/// Decimal rendering with exactly `places` digits after the point, half-to-even.
pub fn to_decimal(value: &Rational, places: u32) -> String {
    let rounded = round_half_even(value, places);
    let scale = BigInt::from(10u32).pow(places);
    let units = (rounded * Rational::from_integer(scale.clone())).to_integer();
    let negative = units.is_negative();
    let units = units.abs();
    let (whole, frac) = units.div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0>width$}", width = places as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("36/37").unwrap(), ratio(36, 37));
        assert_eq!(parse(" 4 / 8 ").unwrap(), ratio(1, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert_eq!(format(&ratio(8, 4)), "2");
        assert_eq!(format(&ratio(-6, 4)), "-3/2");
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(to_decimal(&ratio(37, 15), 2), "2.47");
        assert_eq!(to_decimal(&ratio(22, 15), 2), "1.47");
        assert_eq!(to_decimal(&ratio(2, 3), 2), "0.67");
        assert_eq!(to_decimal(&ratio(36, 37), 2), "0.97");
        assert_eq!(to_decimal(&ratio(20, 37), 2), "0.54");
        assert_eq!(to_decimal(&ratio(1, 8), 2), "0.12");
        assert_eq!(to_decimal(&ratio(3, 8), 2), "0.38");
        assert_eq!(to_decimal(&ratio(-1, 3), 4), "-0.3333");
        assert_eq!(to_decimal(&int(5), 0), "5");
    }
}
