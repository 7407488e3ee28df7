//! Small helpers around `num::BigRational`, the exact scalar type used by
//! every identity test in this crate.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar: arbitrary-precision rational.
pub type Rational = BigRational;

pub fn ratio_u64(numer: u64, denom: u64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Checks 0 ≤ x ≤ 1.
pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses "p/q", an integer, or a plain decimal such as "0.25" into an exact
/// rational. Scientific notation is not accepted: the point of this parser is
/// that the result is exactly the written number.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::ParseNumber(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let p: BigInt = num.trim().parse().map_err(|_| err())?;
        let q: BigInt = den.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let negative = int.starts_with('-');
        let whole: BigInt = int.parse().map_err(|_| err())?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits: BigInt = frac.parse().map_err(|_| err())?;
        let scale = num::pow::pow(BigInt::from(10u32), frac.len());
        let frac_part = Rational::new(digits, scale);
        let whole = Rational::from_integer(whole);
        return Ok(if negative {
            whole - frac_part
        } else {
            whole + frac_part
        });
    }
    let v: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(v))
}

/// Parses like [`parse_rational`] and additionally requires membership in [0, 1].
pub fn parse_unit_rational(s: &str) -> Result<Rational> {
    let x = parse_rational(s)?;
    if !in_unit_interval(&x) {
        return Err(Error::OutOfUnitInterval {
            what: "input",
            value: to_f64(&x),
        });
    }
    Ok(x)
}
