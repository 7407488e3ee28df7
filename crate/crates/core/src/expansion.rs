//! The interval map `R_N(x) = N/(1−x) − ⌊N/(1−x)⌋`, digit extraction,
//! expansion and reconstruction, convergents, and the approximation bound.
//!
//! Two arithmetic paths coexist. The exact path works on `BigRational` and is
//! the oracle for every identity in the crate; the `f64` path exists for
//! Monte Carlo and operator throughput. The map is expanding, so floating
//! orbits lose digit fidelity after roughly 50/log₂N steps — whenever a test
//! needs trustworthy digits it goes through the exact path.

use num::{BigInt, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::rational::{in_unit_interval, Rational};

/// A digit of the expansion: an integer ≥ N, or the infinite marker that
/// only the point x = 1 produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Digit {
    Finite(u64),
    Infinite,
}

impl Digit {
    pub fn value(self) -> Option<u64> {
        match self {
            Digit::Finite(v) => Some(v),
            Digit::Infinite => None,
        }
    }
}

/// Result of expanding a point for a requested number of digits.
///
/// `truncated` is set when an iterate landed exactly on 1, whose digit is
/// infinite; the digits collected up to that point are still valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub digits: Vec<u64>,
    pub truncated: bool,
}

/// Exact integer convergent p_k/q_k of an expansion prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub index: usize,
}

fn check_unit_f64(what: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfUnitInterval { what, value: x });
    }
    Ok(())
}

fn check_unit(what: &'static str, x: &Rational) -> Result<()> {
    if !in_unit_interval(x) {
        return Err(Error::OutOfUnitInterval {
            what,
            value: crate::rational::to_f64(x),
        });
    }
    Ok(())
}

fn check_digit(params: &Params, d: u64) -> Result<()> {
    if d < params.n_u64() {
        return Err(Error::DigitBelowMinimum {
            digit: d,
            min: params.n(),
        });
    }
    Ok(())
}

/// One application of the map. Exact in, exact out; `renyi_map(1) = 0`.
pub fn renyi_map(params: &Params, x: &Rational) -> Result<Rational> {
    check_unit("x", x)?;
    if x.is_one() {
        return Ok(Rational::zero());
    }
    let t = params.n_rational() / (Rational::one() - x);
    Ok(&t - t.floor())
}

pub fn renyi_map_f64(params: &Params, x: f64) -> Result<f64> {
    check_unit_f64("x", x)?;
    if x == 1.0 {
        return Ok(0.0);
    }
    let t = params.n_f64() / (1.0 - x);
    Ok(t - t.floor())
}

/// First digit a₁(x) = ⌊N/(1−x)⌋, infinite at x = 1.
pub fn digit(params: &Params, x: &Rational) -> Result<Digit> {
    check_unit("x", x)?;
    if x.is_one() {
        return Ok(Digit::Infinite);
    }
    let t = params.n_rational() / (Rational::one() - x);
    let d = t.floor().to_integer();
    d.to_u64().map(Digit::Finite).ok_or(Error::DigitOverflow)
}

pub fn digit_f64(params: &Params, x: f64) -> Result<Digit> {
    check_unit_f64("x", x)?;
    if x == 1.0 {
        return Ok(Digit::Infinite);
    }
    let t = params.n_f64() / (1.0 - x);
    if t >= u64::MAX as f64 {
        return Err(Error::DigitOverflow);
    }
    Ok(Digit::Finite(t.floor() as u64))
}

/// The inverse branch u_{N,i}(x) = 1 − N/(x+i), a right inverse of the map.
pub fn inverse_branch(params: &Params, i: u64, x: &Rational) -> Rational {
    let i = Rational::from_integer(BigInt::from(i));
    Rational::one() - params.n_rational() / (x + i)
}

#[inline]
pub fn inverse_branch_f64(params: &Params, i: u64, x: f64) -> f64 {
    1.0 - params.n_f64() / (x + i as f64)
}

/// Extracts the first `count` digits of x by exact iteration.
pub fn expand(params: &Params, x: &Rational, count: usize) -> Result<Expansion> {
    check_unit("x", x)?;
    let mut digits = Vec::with_capacity(count);
    let mut cur = x.clone();
    for _ in 0..count {
        match digit(params, &cur)? {
            Digit::Finite(d) => {
                let t = params.n_rational() / (Rational::one() - &cur);
                cur = &t - t.floor();
                digits.push(d);
            }
            Digit::Infinite => {
                return Ok(Expansion {
                    digits,
                    truncated: true,
                })
            }
        }
    }
    Ok(Expansion {
        digits,
        truncated: false,
    })
}

/// Floating-point expansion; digits are only trustworthy for short prefixes.
pub fn expand_f64(params: &Params, x: f64, count: usize) -> Result<Expansion> {
    check_unit_f64("x", x)?;
    let mut digits = Vec::with_capacity(count);
    let mut cur = x;
    for _ in 0..count {
        match digit_f64(params, cur)? {
            Digit::Finite(d) => {
                let t = params.n_f64() / (1.0 - cur);
                cur = t - t.floor();
                digits.push(d);
            }
            Digit::Infinite => {
                return Ok(Expansion {
                    digits,
                    truncated: true,
                })
            }
        }
    }
    Ok(Expansion {
        digits,
        truncated: false,
    })
}

/// Convergents (p_k, q_k) for k = 0..=n of an admissible block, by the
/// three-term recurrences
///
/// ```text
/// p_0 = 1,  p_1 = 1 + a_1 − N,  p_k = (1 + a_k) p_{k−1} − N p_{k−2}
/// q_0 = 1,  q_1 = 1 + a_1,      q_k = (1 + a_k) q_{k−1} − N q_{k−2}
/// ```
pub fn convergents(params: &Params, digits: &[u64]) -> Result<Vec<Convergent>> {
    let n_big = params.n_big();
    let mut out = Vec::with_capacity(digits.len() + 1);
    out.push(Convergent {
        p: BigInt::one(),
        q: BigInt::one(),
        index: 0,
    });
    for (k, &a) in digits.iter().enumerate() {
        check_digit(params, a)?;
        let a = BigInt::from(a);
        let (p, q) = if k == 0 {
            (BigInt::one() + &a - &n_big, BigInt::one() + &a)
        } else {
            let coef = BigInt::one() + &a;
            let prev = &out[k];
            let prev2 = &out[k - 1];
            (
                &coef * &prev.p - &n_big * &prev2.p,
                &coef * &prev.q - &n_big * &prev2.q,
            )
        };
        out.push(Convergent { p, q, index: k + 1 });
    }
    Ok(out)
}

/// Reconstructs the point with digit block `digits` and tail t = R_N^n(x):
///
/// ```text
/// x = (p_n + (t−1) p_{n−1}) / (q_n + (t−1) q_{n−1})
/// ```
///
/// With tail 0 this is the left endpoint of the block's cylinder; with tail 1
/// it is p_n/q_n. The empty block returns the tail unchanged.
pub fn evaluate(params: &Params, digits: &[u64], tail: &Rational) -> Result<Rational> {
    check_unit("tail", tail)?;
    if digits.is_empty() {
        return Ok(tail.clone());
    }
    let convs = convergents(params, digits)?;
    let last = &convs[digits.len()];
    let prev = &convs[digits.len() - 1];
    let shift = tail - Rational::one();
    let numer =
        Rational::from_integer(last.p.clone()) + &shift * Rational::from_integer(prev.p.clone());
    let denom =
        Rational::from_integer(last.q.clone()) + shift * Rational::from_integer(prev.q.clone());
    Ok(numer / denom)
}

/// Floating reconstruction via right-to-left composition of inverse branches,
/// which is numerically stable (every branch is a contraction).
pub fn evaluate_f64(params: &Params, digits: &[u64], tail: f64) -> Result<f64> {
    check_unit_f64("tail", tail)?;
    let mut x = tail;
    for &d in digits.iter().rev() {
        check_digit(params, d)?;
        x = inverse_branch_f64(params, d, x);
    }
    Ok(x)
}

/// The bound |x − p_n/q_n| ≤ N^n / (q_n (q_n − q_{n−1})), as an exact rational.
pub fn error_bound(
    params: &Params,
    conv_n: &Convergent,
    conv_prev: &Convergent,
) -> Result<Rational> {
    if conv_n.index != conv_prev.index + 1 {
        return Err(Error::NonConsecutiveConvergents {
            hi: conv_n.index,
            lo: conv_prev.index,
        });
    }
    let power = num::pow::pow(params.n_big(), conv_n.index);
    let gap = &conv_n.q - &conv_prev.q;
    Ok(Rational::new(power, &conv_n.q * gap))
}

/// The attracting fixed point x* = (√(N²+4) − N)/2 of the inverse branch
/// with digit N+1; the positive root of x² + Nx − 1.
pub fn fixed_point_xstar(params: &Params) -> f64 {
    let n = params.n_f64();
    ((n * n + 4.0).sqrt() - n) / 2.0
}

/// Exact orbit of a dyadic-or-rational point under the map, in word-sized
/// arithmetic.
///
/// Writing x = p/q with 0 ≤ p ≤ q, one step sends (p, q) to (Nq mod d, d)
/// with d = q − p, so the denominator never grows: a u64 pair with u128
/// intermediates iterates the map exactly for any number of steps. This is
/// what makes "high-precision" Monte Carlo orbits cheap — they are not high
/// precision, they are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOrbit {
    num: u64,
    den: u64,
}

impl ExactOrbit {
    const UNIT_DEN: u64 = 1 << 63;

    /// Point num/den; requires num ≤ den, den > 0.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::OutOfUnitInterval {
                what: "orbit start",
                value: num as f64 / den as f64,
            });
        }
        Ok(ExactOrbit { num, den })
    }

    /// Nearest point of the form k/2⁶³ at or below x.
    pub fn from_unit_f64(x: f64) -> Result<Self> {
        check_unit_f64("orbit start", x)?;
        let k = ((x * Self::UNIT_DEN as f64) as u64).min(Self::UNIT_DEN);
        ExactOrbit::new(k, Self::UNIT_DEN)
    }

    /// Applies the map once and returns the digit consumed
    /// (the digit of the pre-step position; `Infinite` exactly at 1).
    pub fn step(&mut self, params: &Params) -> Digit {
        if self.num == self.den {
            self.num = 0;
            self.den = 1;
            return Digit::Infinite;
        }
        let d = self.den - self.num;
        let v = params.n_u64() as u128 * self.den as u128;
        let a = v / d as u128;
        self.num = (v % d as u128) as u64;
        self.den = d;
        // a = ⌊N q / (q−p)⌋ = ⌊N/(1−x)⌋ fits: N q ≤ 2^96.
        Digit::Finite(a as u64)
    }

    pub fn position_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn position(&self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Exact comparison of the orbit position against num/den.
    pub fn is_below(&self, num: u64, den: u64) -> bool {
        (self.num as u128) * (den as u128) < (num as u128) * (self.den as u128)
    }
}
