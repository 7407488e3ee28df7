//! The two-dimensional natural extension of the map, its inverse and
//! iterates, extended digits, and the extended invariant measure with its
//! closed-form rectangle CDF.
//!
//! The extension acts on the unit square by
//! `(x, y) ↦ (R_N(x), u_{N,a₁(x)}(y))`; its inverse swaps the roles of the
//! coordinates. The extended measure has density
//! `N / (log(N/(N−1)) · (N−(1−x)(1−y))²)`.

use rand::Rng;
use serde::Serialize;

use crate::cylinders::bbl_conditional_f64;
use crate::error::{Error, Result};
use crate::expansion::{
    digit, digit_f64, inverse_branch, inverse_branch_f64, renyi_map, renyi_map_f64, Digit,
};
use crate::measures::{rho_inverse_cdf, rho_t_inverse_cdf};
use crate::params::Params;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtPoint {
    pub x: f64,
    pub y: f64,
}

impl ExtPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        for (what, v) in [("x", x), ("y", y)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfUnitInterval { what, value: v });
            }
        }
        Ok(ExtPoint { x, y })
    }
}

/// Forward step of the extension; rejects x = 1, whose digit is infinite.
pub fn ext_map(params: &Params, pt: ExtPoint) -> Result<ExtPoint> {
    match digit_f64(params, pt.x)? {
        Digit::Finite(a) => Ok(ExtPoint {
            x: renyi_map_f64(params, pt.x)?,
            y: inverse_branch_f64(params, a, pt.y),
        }),
        Digit::Infinite => Err(Error::BoundaryOrbit),
    }
}

/// Inverse step; rejects y = 1.
pub fn ext_inverse(params: &Params, pt: ExtPoint) -> Result<ExtPoint> {
    match digit_f64(params, pt.y)? {
        Digit::Finite(a) => Ok(ExtPoint {
            x: inverse_branch_f64(params, a, pt.x),
            y: renyi_map_f64(params, pt.y)?,
        }),
        Digit::Infinite => Err(Error::BoundaryOrbit),
    }
}

/// Exact-rational forward step, for bit-exact bijectivity checks.
pub fn ext_map_exact(params: &Params, x: &Rational, y: &Rational) -> Result<(Rational, Rational)> {
    match digit(params, x)? {
        Digit::Finite(a) => Ok((renyi_map(params, x)?, inverse_branch(params, a, y))),
        Digit::Infinite => Err(Error::BoundaryOrbit),
    }
}

pub fn ext_inverse_exact(
    params: &Params,
    x: &Rational,
    y: &Rational,
) -> Result<(Rational, Rational)> {
    match digit(params, y)? {
        Digit::Finite(a) => Ok((inverse_branch(params, a, x), renyi_map(params, y)?)),
        Digit::Infinite => Err(Error::BoundaryOrbit),
    }
}

/// n-fold composition: forward for n > 0, inverse for n < 0, identity at 0.
pub fn ext_iterate(params: &Params, pt: ExtPoint, n: i64) -> Result<ExtPoint> {
    let mut cur = pt;
    if n >= 0 {
        for _ in 0..n {
            cur = ext_map(params, cur)?;
        }
    } else {
        for _ in 0..(-n) {
            cur = ext_inverse(params, cur)?;
        }
    }
    Ok(cur)
}

/// Extended digit ā_l(x,y) = a₁ of the first coordinate of the (l−1)-th
/// iterate; defined for every integer l because the extension is invertible.
pub fn ext_digit(params: &Params, pt: ExtPoint, l: i64) -> Result<Digit> {
    let shifted = ext_iterate(params, pt, l - 1)?;
    digit_f64(params, shifted.x)
}

/// ρ̄_N of the rectangle [0,x] × [0,y], in closed form:
///
/// ```text
/// (1/log(N/(N−1))) · [ log((N−1+x)/(N−1)) − log((N−(1−x)(1−y))/(N−1+y)) ]
/// ```
///
/// Both marginals reduce to ρ_N; the full square has mass 1.
pub fn ext_measure_rect(params: &Params, x: f64, y: f64) -> f64 {
    let n = params.n_f64();
    let a = ((n - 1.0 + x) / (n - 1.0)).ln();
    let b = ((n - (1.0 - x) * (1.0 - y)) / (n - 1.0 + y)).ln();
    (a - b) / params.log_ratio()
}

/// Density of ρ̄_N at (x, y).
pub fn ext_density(params: &Params, x: f64, y: f64) -> f64 {
    let n = params.n_f64();
    let d = n - (1.0 - x) * (1.0 - y);
    n / (params.log_ratio() * d * d)
}

/// The ρ̄_N-conditional CDF of the present given the whole past,
/// Nx/(N−(1−x)(1−a)) with a the reversed evaluation of the past digits.
#[inline]
pub fn conditional_cdf(params: &Params, a: f64, x: f64) -> f64 {
    bbl_conditional_f64(params, a, x)
}

/// CDF of the tilted family ρ_{N,t}; ρ_{N,1} is Lebesgue measure.
#[inline]
pub fn rho_t_cdf(params: &Params, t: f64, x: f64) -> f64 {
    crate::measures::rho_t_cdf(params, t, x)
}

/// Draws (x, y) ~ ρ̄_N: x from the ρ_N marginal by inverse CDF, then y from
/// the conditional law given x, which is exactly ρ_{N,x}.
pub fn sample_ext_point<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> ExtPoint {
    let x = rho_inverse_cdf(params, rng.random::<f64>());
    let y = rho_t_inverse_cdf(params, x, rng.random::<f64>());
    ExtPoint { x, y }
}

/// Monte Carlo check that ρ̄_N is preserved: estimates
/// ρ̄_N(R̄_N^{−1}([0,x]×[0,y])) by sampling from ρ̄_N and compares with the
/// closed-form rectangle mass.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub rect: (f64, f64),
    pub estimate: f64,
    pub closed_form: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl InvarianceReport {
    pub fn discrepancy(&self) -> f64 {
        (self.estimate - self.closed_form).abs()
    }

    /// Discrepancy in units of the Monte Carlo standard error.
    pub fn sigmas(&self) -> f64 {
        if self.discrepancy() == 0.0 {
            0.0
        } else {
            self.discrepancy() / self.std_error.max(f64::MIN_POSITIVE)
        }
    }
}

pub fn ext_invariance_check(
    params: &Params,
    rect: (f64, f64),
    samples: u64,
    seed: u64,
) -> Result<InvarianceReport> {
    let (rx, ry) = rect;
    ExtPoint::new(rx, ry)?;
    let hits: u64 = crate::mc::run_chunks(samples, seed, |len, rng| {
        let mut count = 0u64;
        for _ in 0..len {
            let pt = sample_ext_point(params, rng);
            // the sampler never produces x = 1 since random::<f64>() < 1
            let image = ext_map(params, pt).expect("interior point");
            if image.x <= rx && image.y <= ry {
                count += 1;
            }
        }
        count
    })
    .into_iter()
    .sum();
    let estimate = hits as f64 / samples as f64;
    let std_error = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    Ok(InvarianceReport {
        rect,
        estimate,
        closed_form: ext_measure_rect(params, rx, ry),
        std_error,
        n_samples: samples,
        seed,
    })
}
