//! Goodness-of-fit helpers used by the verification panels: Kolmogorov–
//! Smirnov statistics and the asymptotic Kolmogorov tail.

/// One-sample KS statistic: sup |F_emp − F| against a reference CDF.
/// Sorts a copy of the sample.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Complementary CDF of the Kolmogorov distribution,
/// Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²).
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut total = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        total += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Asymptotic one-sample p-value.
pub fn ks_p_value(statistic: f64, n: usize) -> f64 {
    kolmogorov_tail(statistic * (n as f64).sqrt())
}

/// Asymptotic two-sample p-value.
pub fn ks_two_sample_p_value(statistic: f64, n: usize, m: usize) -> f64 {
    let eff = (n as f64 * m as f64) / (n as f64 + m as f64);
    kolmogorov_tail(statistic * eff.sqrt())
}

/// Two-sample chi-square homogeneity statistic on matched count vectors
/// (equal totals): Σ (o₁ − o₂)²/(o₁ + o₂), with dof = nonempty bins − 1.
pub fn chi_square_two_sample(obs1: &[u64], obs2: &[u64]) -> (f64, usize) {
    assert_eq!(obs1.len(), obs2.len());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&a, &b) in obs1.iter().zip(obs2) {
        let total = (a + b) as f64;
        if total > 0.0 {
            let diff = a as f64 - b as f64;
            stat += diff * diff / total;
            bins += 1;
        }
    }
    (stat, bins.saturating_sub(1))
}

/// One-sample chi-square statistic against expected counts.
pub fn chi_square_goodness(observed: &[u64], expected: &[f64]) -> (f64, usize) {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e > 0.0 {
            let diff = o as f64 - e;
            stat += diff * diff / e;
            bins += 1;
        }
    }
    (stat, bins.saturating_sub(1))
}
