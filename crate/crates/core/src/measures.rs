//! The invariant measure ρ_N, the tilted family ρ_{N,t}, and their inverses.
//!
//! ρ_N has density 1/(log(N/(N−1)) (x+N−1)) on [0,1]; ρ_{N,t} is the
//! one-parameter family of conditional laws with CDF Nx/(N−(1−x)(1−t)),
//! and ρ_{N,1} is Lebesgue measure.

use crate::params::Params;

/// dρ_N/dλ at x.
#[inline]
pub fn rho_density(params: &Params, x: f64) -> f64 {
    1.0 / (params.log_ratio() * (x + params.n_f64() - 1.0))
}

/// ρ_N([0, x]) = log((x+N−1)/(N−1)) / log(N/(N−1)).
#[inline]
pub fn rho_cdf(params: &Params, x: f64) -> f64 {
    let n = params.n_f64();
    ((x + n - 1.0) / (n - 1.0)).ln() / params.log_ratio()
}

/// ρ_N((u, 1]) = log(N/(u+N−1)) / log(N/(N−1)).
#[inline]
pub fn rho_upper_tail(params: &Params, u: f64) -> f64 {
    let n = params.n_f64();
    (n / (u + n - 1.0)).ln() / params.log_ratio()
}

/// Quantiles of ρ_N: the x with ρ_N([0, x]) = p.
#[inline]
pub fn rho_inverse_cdf(params: &Params, p: f64) -> f64 {
    let n = params.n_f64();
    ((n - 1.0) * ((n / (n - 1.0)).powf(p) - 1.0)).clamp(0.0, 1.0)
}

/// ρ_{N,t}([0, x]) = Nx / (N − (1−x)(1−t)).
#[inline]
pub fn rho_t_cdf(params: &Params, t: f64, x: f64) -> f64 {
    crate::cylinders::bbl_conditional_f64(params, t, x)
}

/// Quantiles of ρ_{N,t}: x = p(N−1+t) / (N − p(1−t)).
#[inline]
pub fn rho_t_inverse_cdf(params: &Params, t: f64, p: f64) -> f64 {
    let n = params.n_f64();
    (p * (n - 1.0 + t) / (n - p * (1.0 - t))).clamp(0.0, 1.0)
}
