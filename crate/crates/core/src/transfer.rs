//! The Perron–Frobenius operator of the map under its invariant measure,
//! its Lebesgue-density counterpart, grid iteration, the limit functional,
//! and empirical geometric-rate estimation.
//!
//! `U f(x) = Σ_{i≥N} P_{N,i}(x) f(u_{N,i}(x))`. Branch sums are truncated at
//! M with the exact telescoped tail mass (x+N−1)/(x+M) attached to the
//! cluster value f(1), since the inverse branches accumulate at 1. The
//! Lebesgue form `L h(x) = Σ_i N/(x+i)² h(u_{N,i}(x))` is U conjugated by
//! x ↦ (x+N−1): term by term the two agree, tails included.

use rayon::prelude::*;
use serde::Serialize;

use crate::cylinders::{transition_prob_unchecked_f64, transition_tail_f64};
use crate::error::{Error, Result};
use crate::expansion::inverse_branch_f64;
use crate::interp::{DensityForm, GridDensity};
use crate::measures::rho_density;
use crate::params::Params;
use crate::quadrature::GaussLegendre;

/// Default branch-sum truncation.
pub fn default_truncation(params: &Params) -> u64 {
    (params.n_u64() * 100).max(1000)
}

pub const DEFAULT_NODES: usize = 65;
pub const DEFAULT_QUAD_POINTS: usize = 128;

fn check_truncation(params: &Params, m: u64) -> Result<()> {
    let min = params.n_u64() + 10;
    if m < min {
        return Err(Error::TruncationTooSmall { m, min });
    }
    Ok(())
}

/// One pointwise application of U to an f-form density.
pub fn apply_u(params: &Params, f: &GridDensity, x: f64, truncation: u64) -> Result<f64> {
    f.require_form(DensityForm::Invariant)?;
    check_truncation(params, truncation)?;
    // tail first, then branches from small to large terms
    let mut acc = transition_tail_f64(params, x, truncation) * f.eval(1.0);
    let mut i = truncation;
    let n = params.n_u64();
    while i >= n {
        acc +=
            transition_prob_unchecked_f64(params, x, i) * f.eval(inverse_branch_f64(params, i, x));
        i -= 1;
    }
    Ok(acc)
}

/// One pointwise application of the Lebesgue-density transfer operator to an
/// h-form density.
pub fn apply_l(params: &Params, h: &GridDensity, x: f64, truncation: u64) -> Result<f64> {
    h.require_form(DensityForm::Lebesgue)?;
    check_truncation(params, truncation)?;
    let n = params.n_f64();
    let mut acc = h.eval(1.0) * n / (x + truncation as f64);
    let mut i = truncation;
    while i >= params.n_u64() {
        let d = x + i as f64;
        acc += n / (d * d) * h.eval(inverse_branch_f64(params, i, x));
        i -= 1;
    }
    Ok(acc)
}

/// Re-samples U^n f at the grid nodes; the result stays in f-form.
/// Nodes are independent, so each step fans out across threads; the
/// iteration itself is a sequential barrier.
pub fn iterate_u(
    params: &Params,
    f: &GridDensity,
    steps: usize,
    truncation: u64,
) -> Result<GridDensity> {
    f.require_form(DensityForm::Invariant)?;
    check_truncation(params, truncation)?;
    let mut cur = f.clone();
    for _ in 0..steps {
        let values = cur
            .nodes()
            .par_iter()
            .map(|&x| apply_u(params, &cur, x, truncation))
            .collect::<Result<Vec<_>>>()?;
        cur = cur.with_values(values, DensityForm::Invariant);
    }
    Ok(cur)
}

/// The limit functional U^∞ f = ∫ f dρ_N, by Gauss–Legendre quadrature
/// against the invariant density.
pub fn u_infinity(params: &Params, f: &GridDensity, quad_points: usize) -> Result<f64> {
    f.require_form(DensityForm::Invariant)?;
    let rule = GaussLegendre::new(quad_points);
    Ok(rule.integrate(0.0, 1.0, |y| f.eval(y) * rho_density(params, y)))
}

/// Empirical geometric rate of ‖U^n f − U^∞ f‖ in the Lipschitz-style norm.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    /// Fitted ratio per step; 0 for exact convergence.
    pub q_hat: f64,
    /// Fitted prefactor.
    pub k_hat: f64,
    /// ‖U^n f − U^∞ f‖ for n = 1..=n_max.
    pub norms: Vec<f64>,
    /// Inclusive 1-based window of `norms` used for the fit.
    pub fit_window: (usize, usize),
    /// All norms vanished to rounding; the fit is degenerate.
    pub exact_convergence: bool,
}

/// Sup norm plus a forward-difference Lipschitz seminorm over the grid — a
/// surrogate for the Lipschitz norm the contraction estimate is stated in.
pub fn grid_lipschitz_norm(nodes: &[f64], values: &[f64]) -> f64 {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slope = nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| ((v[1] - v[0]) / (x[1] - x[0])).abs())
        .fold(0.0f64, f64::max);
    sup + slope
}

pub fn rate_estimate(
    params: &Params,
    f: &GridDensity,
    n_max: usize,
    truncation: u64,
) -> Result<RateReport> {
    assert!(n_max >= 5, "need at least 5 iterates for a rate fit");
    let limit = u_infinity(params, f, DEFAULT_QUAD_POINTS)?;
    let mut norms = Vec::with_capacity(n_max);
    let mut cur = f.clone();
    for _ in 1..=n_max {
        cur = iterate_u(params, &cur, 1, truncation)?;
        let diff: Vec<f64> = cur.values().iter().map(|v| v - limit).collect();
        norms.push(grid_lipschitz_norm(cur.nodes(), &diff));
    }

    if norms.iter().all(|&e| e < 1e-12) {
        return Ok(RateReport {
            q_hat: 0.0,
            k_hat: 0.0,
            norms,
            fit_window: (1, n_max),
            exact_convergence: true,
        });
    }

    // fit on the last half, where transients have died out
    let window = (n_max / 2).max(3);
    let start = n_max - window; // 0-based index of first fitted norm
    let tail = &norms[start..];
    if tail.windows(2).any(|w| w[1] >= w[0]) || tail.iter().any(|&e| e <= 0.0) {
        return Err(Error::FitRejected);
    }
    let (slope, intercept) = least_squares_log(start + 1, tail);
    Ok(RateReport {
        q_hat: slope.exp(),
        k_hat: intercept.exp(),
        norms,
        fit_window: (start + 1, n_max),
        exact_convergence: false,
    })
}

/// Fits k·qⁿ to the last half of an error sequence e_1, e_2, …; returns
/// (q, k), or None when the tail is not positive and decreasing.
pub fn fit_geometric_tail(errors: &[f64]) -> Option<(f64, f64)> {
    if errors.len() < 3 {
        return None;
    }
    let window = (errors.len() / 2).max(3).min(errors.len());
    let start = errors.len() - window;
    let tail = &errors[start..];
    if tail.iter().any(|&e| e <= 1e-15) || tail.windows(2).any(|w| w[1] >= w[0]) {
        return None;
    }
    let (slope, intercept) = least_squares_log(start + 1, tail);
    Some((slope.exp(), intercept.exp()))
}

/// Least squares of log e_n against n; returns (slope, intercept).
fn least_squares_log(first_n: usize, errors: &[f64]) -> (f64, f64) {
    let m = errors.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (k, &e) in errors.iter().enumerate() {
        let x = (first_n + k) as f64;
        let y = e.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    (slope, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(n: u32) -> Params {
        Params::new(n).unwrap()
    }

    fn cheb(form: DensityForm, f: impl Fn(f64) -> f64) -> GridDensity {
        GridDensity::chebyshev(DEFAULT_NODES, form, f)
    }

    #[test]
    fn constants_are_fixed() {
        let params = p(2);
        let one = cheb(DensityForm::Invariant, |_| 1.0);
        for x in [0.0, 0.33, 0.5, 0.99, 1.0] {
            let v = apply_u(&params, &one, x, 1000).unwrap();
            assert_relative_eq!(v, 1.0, epsilon = 1e-13);
        }
        let iterated = iterate_u(&params, &one, 5, 1000).unwrap();
        for v in iterated.values() {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_function_at_zero_matches_series() {
        // U id(0) = Σ_{i≥2} P_{2,i}(0)(1−2/i) = 1 − 2(2 − π²/6)
        let params = p(2);
        let f = cheb(DensityForm::Invariant, |y| y);
        let expected = 1.0 - 2.0 * (2.0 - std::f64::consts::PI.powi(2) / 6.0);
        let got = apply_u(&params, &f, 0.0, 2_000_000).unwrap();
        assert_relative_eq!(got, expected, epsilon = 1e-10);

        // independent series oracle with the same analytic target
        let mut series = 0.0;
        for i in (2u64..=1_000_000).rev() {
            let i = i as f64;
            series += 1.0 / (i * (i - 1.0)) * (1.0 - 2.0 / i);
        }
        assert_relative_eq!(series, expected, epsilon = 1e-6);
    }

    #[test]
    fn operator_is_linear() {
        let params = p(3);
        let f = cheb(DensityForm::Invariant, |y| y * y);
        let g = cheb(DensityForm::Invariant, |y| (1.0 + y).ln());
        let combo = cheb(DensityForm::Invariant, |y| {
            2.5 * y * y - 1.25 * (1.0 + y).ln()
        });
        for x in [0.1, 0.6, 1.0] {
            let lhs = apply_u(&params, &combo, x, 1000).unwrap();
            let rhs = 2.5 * apply_u(&params, &f, x, 1000).unwrap()
                - 1.25 * apply_u(&params, &g, x, 1000).unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn positivity_is_preserved() {
        let params = p(2);
        let f = cheb(DensityForm::Invariant, |y| (8.0 * y).sin().abs() + 0.01);
        let next = iterate_u(&params, &f, 1, 1000).unwrap();
        assert!(next.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn invariant_density_is_fixed_by_l() {
        // h*(x) = C/(x+N−1) telescopes exactly through the truncated sum + tail
        for n in [2u32, 3, 5, 10] {
            let params = p(n);
            let c = 1.0 / params.log_ratio();
            let shift = params.n_f64() - 1.0;
            let hstar = cheb(DensityForm::Lebesgue, |x| c / (x + shift));
            for x in [0.0, 0.25, 0.7, 1.0] {
                let v = apply_l(&params, &hstar, x, default_truncation(&params)).unwrap();
                assert_relative_eq!(v, c / (x + shift), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lebesgue_operator_constant_at_zero_matches_series() {
        // L 1(0) = Σ_{i≥2} 2/i² = 2(π²/6 − 1)
        let params = p(2);
        let h = cheb(DensityForm::Lebesgue, |_| 1.0);
        let expected = 2.0 * (std::f64::consts::PI.powi(2) / 6.0 - 1.0);
        let got = apply_l(&params, &h, 0.0, 3_000_000).unwrap();
        assert_relative_eq!(got, expected, epsilon = 1e-9);
    }

    #[test]
    fn conjugation_identity() {
        // (x+N−1)⁻¹ · U[(·+N−1) h](x) = L h(x) on Chebyshev nodes
        let params = p(2);
        let shift = params.n_f64() - 1.0;
        let h = GridDensity::chebyshev(33, DensityForm::Lebesgue, |x| 1.0 + 0.5 * (3.0 * x).cos());
        let f = GridDensity::chebyshev(33, DensityForm::Invariant, |x| {
            (x + shift) * (1.0 + 0.5 * (3.0 * x).cos())
        });
        let nodes = crate::interp::chebyshev_nodes(33);
        let mut worst: f64 = 0.0;
        for &x in &nodes {
            let via_u = apply_u(&params, &f, x, 1000).unwrap() / (x + shift);
            let via_l = apply_l(&params, &h, x, 1000).unwrap();
            worst = worst.max((via_u - via_l).abs());
        }
        assert!(worst <= 1e-8, "conjugation mismatch {worst}");
    }

    #[test]
    fn form_mismatches_are_rejected() {
        let params = p(2);
        let h = cheb(DensityForm::Lebesgue, |_| 1.0);
        let f = cheb(DensityForm::Invariant, |_| 1.0);
        assert!(apply_u(&params, &h, 0.5, 1000).is_err());
        assert!(apply_l(&params, &f, 0.5, 1000).is_err());
        assert!(apply_u(&params, &f, 0.5, 5).is_err());
    }

    #[test]
    fn limit_functional_values() {
        let params = p(2);
        // probability measure: constants integrate to themselves
        let c = cheb(DensityForm::Invariant, |_| 3.25);
        assert_relative_eq!(u_infinity(&params, &c, 128).unwrap(), 3.25, epsilon = 1e-12);

        // the f-form of Lebesgue measure integrates to 1
        let f0 = GridDensity::uniform().to_invariant_form(&params).unwrap();
        let f0 = cheb(DensityForm::Invariant, |x| f0.eval(x));
        assert_relative_eq!(u_infinity(&params, &f0, 128).unwrap(), 1.0, epsilon = 1e-12);

        // the log-less variant (x+N−1) integrates to 1/log(N/(N−1))
        let bare = cheb(DensityForm::Invariant, |x| x + 1.0);
        assert_relative_eq!(
            u_infinity(&params, &bare, 128).unwrap(),
            1.0 / (2.0f64).ln(),
            epsilon = 1e-12
        );

        // ∫ y dρ_2 = (1 − log 2)/log 2
        let id = cheb(DensityForm::Invariant, |y| y);
        assert_relative_eq!(
            u_infinity(&params, &id, 128).unwrap(),
            (1.0 - (2.0f64).ln()) / (2.0f64).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rate_fit_on_lebesgue_start() {
        let params = p(2);
        let f0 = GridDensity::chebyshev(DEFAULT_NODES, DensityForm::Lebesgue, |_| 1.0)
            .to_invariant_form(&params)
            .unwrap();
        let report = rate_estimate(&params, &f0, 12, 1000).unwrap();
        assert!(!report.exact_convergence);
        assert!(
            report.q_hat > 0.0 && report.q_hat < 1.0,
            "q_hat = {}",
            report.q_hat
        );
        assert!(report.norms.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rate_fit_degenerates_for_constants() {
        let params = p(2);
        let one = cheb(DensityForm::Invariant, |_| 1.0);
        let report = rate_estimate(&params, &one, 6, 1000).unwrap();
        assert!(report.exact_convergence);
        assert_eq!(report.q_hat, 0.0);
    }

    #[test]
    fn integral_preservation_under_u() {
        // adjointness: ∫ Uf dρ_N = ∫ f dρ_N. The branch-sum tail carries an
        // O(N²/M²) bias for non-constant f, hence the large truncation here.
        let params = p(3);
        let f = cheb(DensityForm::Invariant, |y| 0.2 + y * y);
        let before = u_infinity(&params, &f, 128).unwrap();
        let after = u_infinity(&params, &iterate_u(&params, &f, 1, 300_000).unwrap(), 128).unwrap();
        assert_relative_eq!(before, after, epsilon = 1e-10);
    }
}
