//! Radial quadrature for rotationally invariant integrands on `R^d`.
//!
//! An integral `∫_{|k| < r_max} f(|k|) dk` is reduced to
//! `s_{d-1} ∫_0^{r_max} f(r) r^{d-1} dr`, where `s_{d-1} = 2π^{d/2}/Γ(d/2)` is
//! the area of the unit sphere, and the radial integral is approximated by
//! composite Gauss–Legendre panels. The stored weights already contain the
//! angular factor and the Jacobian `r^{d-1}`, so every momentum integral is a
//! plain dot product `Σ w_i f(r_i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{config, Error, Result};

/// Base one-dimensional rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    #[default]
    GaussLegendre,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::GaussLegendre => "gauss-legendre",
        }
    }

    pub fn from_id(id: &str) -> Option<Rule> {
        match id {
            "gauss-legendre" | "gl" => Some(Rule::GaussLegendre),
            _ => None,
        }
    }
}

/// Radial nodes and weights encoding the measure `dk` on a ball in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    dimension: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    rule: Rule,
    /// Panel boundaries, starting at 0 and ending at `r_max`.
    panels: Vec<f64>,
}

impl Quadrature {
    /// Builds a quadrature from explicit nodes and (already angular-weighted)
    /// weights. Used for hand-made toy grids.
    pub fn from_parts(
        dimension: usize,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        r_max: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(config("dimension", "must be at least 1"));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(config("r_max", "must be positive and finite"));
        }
        if nodes.is_empty() {
            return Err(config("n", "at least one node is required"));
        }
        if nodes.len() != weights.len() {
            return Err(Error::Length {
                expected: nodes.len(),
                got: weights.len(),
            });
        }
        if nodes.iter().any(|&r| !(r > 0.0 && r < r_max)) {
            return Err(config("nodes", "nodes must lie in (0, r_max)"));
        }
        if nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(config("nodes", "nodes must be strictly increasing"));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(config("weights", "weights must be positive"));
        }
        Ok(Quadrature {
            dimension,
            nodes,
            weights,
            r_max,
            rule: Rule::GaussLegendre,
            panels: vec![0.0, r_max],
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    /// Panel boundaries `0 = b_0 < b_1 < ... < b_p = r_max`.
    pub fn panels(&self) -> &[f64] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_i w_i · values_i`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::Length {
                expected: self.nodes.len(),
                got: values.len(),
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    /// Integrates `f(r)` evaluated at every node.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * f(r))
            .sum()
    }

    /// Same panels, twice as many nodes in each.
    pub fn refined(&self) -> Result<Quadrature> {
        let breaks = &self.panels[1..self.panels.len() - 1];
        build_composite_grid(
            self.dimension,
            2 * self.len(),
            self.r_max,
            breaks,
            self.rule,
        )
    }
}

/// Area of the unit sphere `S^{d-1}` in `R^d`, i.e. `2π^{d/2}/Γ(d/2)`.
/// For `d = 1` this is 2 (the two points ±1).
pub fn sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * libm::pow(PI, half) / libm::tgamma(half)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-type initial guess for the i-th largest root.
        let mut t = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() <= 1e-16 * t.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d.is_finite() {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[n - 1 - i] = t;
        x[i] = -t;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Single-panel Gauss–Legendre grid on `[0, r_max]`.
pub fn build_radial_grid(d: usize, n: usize, r_max: f64, rule: Rule) -> Result<Quadrature> {
    build_composite_grid(d, n, r_max, &[], rule)
}

/// Composite grid with panel boundaries at `breaks` (points outside
/// `(0, r_max)` are ignored). The `n` nodes are shared out as evenly as
/// possible, earlier panels taking the remainder.
pub fn build_composite_grid(
    d: usize,
    n: usize,
    r_max: f64,
    breaks: &[f64],
    rule: Rule,
) -> Result<Quadrature> {
    if d == 0 {
        return Err(config("dimension", "must be at least 1"));
    }
    if n == 0 {
        return Err(config("n", "must be at least 1"));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(config("r_max", "must be positive and finite"));
    }
    let mut panels = vec![0.0];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b < r_max)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    panels.extend(inner);
    panels.push(r_max);
    let count = panels.len() - 1;
    if n < count {
        return Err(config("n", "fewer nodes than quadrature panels"));
    }

    let area = sphere_area(d);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (p, span) in panels.windows(2).enumerate() {
        let per = n / count + usize::from(p < n % count);
        let (x, w) = match rule {
            Rule::GaussLegendre => gauss_legendre(per),
        };
        let (a, b) = (span[0], span[1]);
        let half = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            let r = a + half * (xi + 1.0);
            nodes.push(r);
            weights.push(wi * half * area * libm::pow(r, d as f64 - 1.0));
        }
    }
    Ok(Quadrature {
        dimension: d,
        nodes,
        weights,
        r_max,
        rule,
        panels,
    })
}
