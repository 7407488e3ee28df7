//! Densities on [0,1] represented by values at interpolation nodes.
//!
//! The transfer operator maps smooth functions to smooth functions, so the
//! default representation is barycentric interpolation on Chebyshev–Lobatto
//! nodes; piecewise-linear grids are the fallback for non-smooth inputs and
//! for tabulated user densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    PiecewiseLinear,
    ChebyshevBarycentric,
}

/// Whether the stored values are a density with respect to Lebesgue measure
/// (`h`-form) or with respect to the invariant measure ρ_N (`f`-form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityForm {
    Lebesgue,
    Invariant,
}

impl DensityForm {
    fn name(self) -> &'static str {
        match self {
            DensityForm::Lebesgue => "Lebesgue (h-form)",
            DensityForm::Invariant => "invariant (f-form)",
        }
    }
}

/// Chebyshev–Lobatto nodes mapped to [0,1], in increasing order.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let m = (count - 1) as f64;
    (0..count)
        .map(|j| (1.0 - (std::f64::consts::PI * j as f64 / m).cos()) / 2.0)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GridDensity {
    nodes: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
    form: DensityForm,
    /// Barycentric weights; empty for piecewise-linear grids.
    #[serde(skip)]
    weights: Vec<f64>,
}

impl GridDensity {
    /// Samples `f` at `count` Chebyshev–Lobatto nodes.
    pub fn chebyshev(count: usize, form: DensityForm, f: impl Fn(f64) -> f64) -> Self {
        let nodes = chebyshev_nodes(count);
        let values = nodes.iter().map(|&x| f(x)).collect();
        let weights = chebyshev_weights(count);
        GridDensity {
            nodes,
            values,
            interpolation: Interpolation::ChebyshevBarycentric,
            form,
            weights,
        }
    }

    /// Piecewise-linear density through the given samples. Nodes must be
    /// strictly increasing and span [0,1].
    pub fn piecewise_linear(nodes: Vec<f64>, values: Vec<f64>, form: DensityForm) -> Result<Self> {
        if nodes.len() < 2
            || nodes.len() != values.len()
            || nodes[0] != 0.0
            || *nodes.last().unwrap() != 1.0
            || nodes.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidGrid { min: 2 });
        }
        Ok(GridDensity {
            nodes,
            values,
            interpolation: Interpolation::PiecewiseLinear,
            form,
            weights: Vec::new(),
        })
    }

    /// The constant density `c` (uniform when c = 1 in h-form).
    pub fn constant(c: f64, form: DensityForm) -> Self {
        GridDensity::piecewise_linear(vec![0.0, 1.0], vec![c, c], form).unwrap()
    }

    pub fn uniform() -> Self {
        GridDensity::constant(1.0, DensityForm::Lebesgue)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn form(&self) -> DensityForm {
        self.form
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn require_form(&self, expected: DensityForm) -> Result<()> {
        if self.form != expected {
            return Err(Error::WrongDensityForm {
                expected: expected.name(),
                got: self.form.name(),
            });
        }
        Ok(())
    }

    /// Same nodes and rule, new values.
    pub fn with_values(&self, values: Vec<f64>, form: DensityForm) -> Self {
        assert_eq!(values.len(), self.nodes.len());
        GridDensity {
            nodes: self.nodes.clone(),
            values,
            interpolation: self.interpolation,
            form,
            weights: self.weights.clone(),
        }
    }

    /// Converts an h-form density to the f-form the transfer operator works
    /// on: f(x) = log(N/(N−1)) (x+N−1) h(x).
    pub fn to_invariant_form(&self, params: &Params) -> Result<GridDensity> {
        self.require_form(DensityForm::Lebesgue)?;
        let c = params.log_ratio();
        let shift = params.n_f64() - 1.0;
        let values = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| c * (x + shift) * v)
            .collect();
        Ok(self.with_values(values, DensityForm::Invariant))
    }

    /// Rescales an h-form density so it integrates to 1 (piecewise-linear
    /// trapezoid integral on its own nodes).
    pub fn normalized(&self) -> Result<GridDensity> {
        self.require_form(DensityForm::Lebesgue)?;
        let total: f64 = self
            .nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[1] - x[0]) * (v[0] + v[1]) / 2.0)
            .sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidGrid { min: 2 });
        }
        let values = self.values.iter().map(|v| v / total).collect();
        Ok(self.with_values(values, DensityForm::Lebesgue))
    }

    /// Evaluates the interpolant at any x in [0,1].
    pub fn eval(&self, x: f64) -> f64 {
        match self.interpolation {
            Interpolation::PiecewiseLinear => self.eval_linear(x),
            Interpolation::ChebyshevBarycentric => self.eval_barycentric(x),
        }
    }

    fn eval_linear(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return self.values[0];
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let hi = self.nodes.partition_point(|&node| node <= x);
        let lo = hi - 1;
        let t = (x - self.nodes[lo]) / (self.nodes[hi] - self.nodes[lo]);
        self.values[lo] + t * (self.values[hi] - self.values[lo])
    }

    fn eval_barycentric(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &vj), &wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let dx = x - xj;
            if dx.abs() < 1e-14 {
                return vj;
            }
            let c = wj / dx;
            num += c * vj;
            den += c;
        }
        num / den
    }
}

/// Barycentric weights for Chebyshev–Lobatto nodes: (−1)^j, halved at the
/// two endpoints. (A common scale factor cancels in the barycentric ratio;
/// the affine map to [0,1] flips the order, which only flips all signs.)
fn chebyshev_weights(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == count - 1 {
                sign / 2.0
            } else {
                sign
            }
        })
        .collect()
}

/// Inverse-CDF sampler for an h-form density, built once from a
/// piecewise-linear CDF table.
#[derive(Debug, Clone)]
pub struct DensitySampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl DensitySampler {
    pub fn new(density: &GridDensity) -> Result<Self> {
        density.require_form(DensityForm::Lebesgue)?;
        // resample smooth densities onto a fine uniform grid
        let xs: Vec<f64> = match density.interpolation() {
            Interpolation::PiecewiseLinear => density.nodes().to_vec(),
            Interpolation::ChebyshevBarycentric => (0..=2048).map(|k| k as f64 / 2048.0).collect(),
        };
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        for w in xs.windows(2) {
            let seg = (w[1] - w[0]) * (density.eval(w[0]) + density.eval(w[1])) / 2.0;
            cdf.push(cdf.last().unwrap() + seg.max(0.0));
        }
        let total = *cdf.last().unwrap();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidGrid { min: 2 });
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(DensitySampler { xs, cdf })
    }

    /// Maps a uniform variate to a sample of the density.
    pub fn sample(&self, u: f64) -> f64 {
        let hi = self.cdf.partition_point(|&c| c <= u).min(self.xs.len() - 1);
        if hi == 0 {
            return self.xs[0];
        }
        let lo = hi - 1;
        let span = self.cdf[hi] - self.cdf[lo];
        if span <= 0.0 {
            return self.xs[lo];
        }
        let t = (u - self.cdf[lo]) / span;
        self.xs[lo] + t * (self.xs[hi] - self.xs[lo])
    }
}
