//! Cylinder intervals, their Lebesgue measures, the Brodén–Borel–Lévy
//! conditional law, the digit transition kernel, and the s-sequence.
//!
//! Everything here is exact when the inputs are exact; the `_f64` variants
//! serve the operator and Monte Carlo code.

use num::{BigInt, One};

use crate::error::{Error, Result};
use crate::expansion::{convergents, inverse_branch};
use crate::params::Params;
use crate::rational::Rational;

/// The half-open interval of points whose expansion starts with `block`.
///
/// `left = (p_n − p_{n−1})/(q_n − q_{n−1})`, `right = p_n/q_n`; points on the
/// left endpoint belong to the cylinder, points on the right do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub block: Vec<u64>,
    pub left: Rational,
    pub right: Rational,
}

impl Cylinder {
    pub fn measure(&self) -> Rational {
        &self.right - &self.left
    }
}

fn check_digit(params: &Params, i: u64) -> Result<()> {
    if i < params.n_u64() {
        return Err(Error::DigitBelowMinimum {
            digit: i,
            min: params.n(),
        });
    }
    Ok(())
}

/// Exact endpoints of the cylinder of an admissible block.
pub fn cylinder(params: &Params, block: &[u64]) -> Result<Cylinder> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let convs = convergents(params, block)?;
    let n = block.len();
    let last = &convs[n];
    let prev = &convs[n - 1];
    let left = Rational::new(&last.p - &prev.p, &last.q - &prev.q);
    let right = Rational::new(last.p.clone(), last.q.clone());
    Ok(Cylinder {
        block: block.to_vec(),
        left,
        right,
    })
}

/// Lebesgue measure N^n / (q_n (q_n − q_{n−1})) of a cylinder, exactly.
pub fn cylinder_measure(params: &Params, block: &[u64]) -> Result<Rational> {
    if block.is_empty() {
        return Ok(Rational::one());
    }
    let convs = convergents(params, block)?;
    let n = block.len();
    let last = &convs[n];
    let prev = &convs[n - 1];
    let power = num::pow::pow(params.n_big(), n);
    Ok(Rational::new(power, &last.q * (&last.q - &prev.q)))
}

/// The Brodén–Borel–Lévy conditional law of the tail given the first n
/// digits: λ(R_N^n < x | a_1,…,a_n) = Nx / (N − (1−x)(1−s_n)).
pub fn bbl_conditional(params: &Params, s: &Rational, x: &Rational) -> Rational {
    let n = params.n_rational();
    let one = Rational::one();
    n.clone() * x / (n - (&one - x) * (one.clone() - s))
}

#[inline]
pub fn bbl_conditional_f64(params: &Params, s: f64, x: f64) -> f64 {
    let n = params.n_f64();
    n * x / (n - (1.0 - x) * (1.0 - s))
}

/// Digit transition kernel P_{N,i}(x) = (x+N−1) / ((x+i)(x+i−1)).
pub fn transition_prob(params: &Params, x: &Rational, i: u64) -> Result<Rational> {
    check_digit(params, i)?;
    let i = Rational::from_integer(BigInt::from(i));
    let one = Rational::one();
    let shift = params.n_rational() - &one;
    Ok((x + shift) / ((x + &i) * (x + i - one)))
}

#[inline]
pub fn transition_prob_unchecked_f64(params: &Params, x: f64, i: u64) -> f64 {
    let i = i as f64;
    (x + params.n_f64() - 1.0) / ((x + i) * (x + i - 1.0))
}

pub fn transition_prob_f64(params: &Params, x: f64, i: u64) -> Result<f64> {
    check_digit(params, i)?;
    Ok(transition_prob_unchecked_f64(params, x, i))
}

/// Exact mass of all branches beyond M: Σ_{i>M} P_{N,i}(x) = (x+N−1)/(x+M).
/// The kernel telescopes, so truncated sums carry no truncation error.
pub fn transition_tail(params: &Params, x: &Rational, m: u64) -> Rational {
    let m = Rational::from_integer(BigInt::from(m));
    (x + params.n_rational() - Rational::one()) / (x + m)
}

#[inline]
pub fn transition_tail_f64(params: &Params, x: f64, m: u64) -> f64 {
    (x + params.n_f64() - 1.0) / (x + m as f64)
}

/// Σ_{i=N}^{M} P_{N,i}(x) plus the exact tail; equals 1 up to rounding.
pub fn transition_sum_with_tail_f64(params: &Params, x: f64, m: u64) -> f64 {
    let mut acc = transition_tail_f64(params, x, m);
    let mut i = m;
    while i >= params.n_u64() {
        acc += transition_prob_unchecked_f64(params, x, i);
        i -= 1;
    }
    acc
}

/// First-digit law λ(a_1 = i) = N / (i(i+1)), exactly.
pub fn digit_law(params: &Params, i: u64) -> Result<Rational> {
    check_digit(params, i)?;
    let i = BigInt::from(i);
    Ok(Rational::new(
        params.n_big(),
        &i * (i.clone() + BigInt::one()),
    ))
}

/// s_0 = 1 and s_k = 1 − N/(a_k + s_{k−1}) = u_{N,a_k}(s_{k−1}); returns
/// s_0..=s_n. Identical to 1 − N q_{k−1}/q_k built from the convergents.
pub fn s_sequence(params: &Params, block: &[u64]) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(block.len() + 1);
    out.push(Rational::one());
    for &a in block {
        check_digit(params, a)?;
        let prev = out.last().unwrap();
        out.push(inverse_branch(params, a, prev));
    }
    Ok(out)
}
