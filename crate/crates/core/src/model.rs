//! Physical parameters, dispersion/coupling families and their samples on a
//! radial grid.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{config, Error, Result};
use crate::quadrature::{build_composite_grid, Quadrature, Rule};

/// Photon dispersion relation `ω(|k|)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Dispersion {
    /// `ω(r) = r`.
    #[default]
    AbsK,
    /// Values at the grid nodes.
    Table(Vec<f64>),
}

/// Coupling function `λ(|k|)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// Explicitly decoupled model, `λ ≡ 0`.
    None,
    /// `λ(r) = √r · 1{r ≤ Λ}`.
    SqrtCutoff { cutoff: f64 },
    /// `λ(r) = √r · exp(-r²/Λ²)`.
    SqrtGaussian { width: f64 },
    /// Values at the grid nodes.
    Table(Vec<Complex64>),
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling::SqrtCutoff { cutoff: 1.0 }
    }
}

/// Spin branch `σ = ±1` of the block-diagonalized Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// Model parameters: atomic level `ε`, coupling constant `α`, dimension `d`
/// and the two radial parameter functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub eps: f64,
    pub alpha: f64,
    pub dimension: usize,
    pub dispersion: Dispersion,
    pub coupling: Coupling,
}

impl Default for ModelSpec {
    /// `d = 1`, `ε = 1`, `α = 1`, `ω(r) = r`, `λ(r) = √r·1{r ≤ 1}`.
    fn default() -> Self {
        ModelSpec {
            eps: 1.0,
            alpha: 1.0,
            dimension: 1,
            dispersion: Dispersion::AbsK,
            coupling: Coupling::default(),
        }
    }
}

impl ModelSpec {
    pub fn with_alpha(&self, alpha: f64) -> ModelSpec {
        ModelSpec {
            alpha,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(config("eps", "must be positive and finite"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(config("alpha", "must be non-negative and finite"));
        }
        if self.dimension == 0 {
            return Err(config("dimension", "must be at least 1"));
        }
        match self.coupling {
            Coupling::SqrtCutoff { cutoff } if !(cutoff > 0.0 && cutoff.is_finite()) => {
                Err(config("lambda_cutoff", "must be positive and finite"))
            }
            Coupling::SqrtGaussian { width } if !(width > 0.0 && width.is_finite()) => {
                Err(config("lambda_cutoff", "must be positive and finite"))
            }
            _ => Ok(()),
        }
    }

    /// Panel boundary a quadrature grid should respect (the sharp cutoff).
    pub fn breakpoint(&self) -> Option<f64> {
        match self.coupling {
            Coupling::SqrtCutoff { cutoff } => Some(cutoff),
            _ => None,
        }
    }

    /// Grid for this model: a single Gauss–Legendre panel, split at the sharp
    /// cutoff when there is one and at least two nodes are requested.
    pub fn grid(&self, n: usize, r_max: f64, rule: Rule) -> Result<Quadrature> {
        match self.breakpoint() {
            Some(cut) if n >= 2 => build_composite_grid(self.dimension, n, r_max, &[cut], rule),
            _ => build_composite_grid(self.dimension, n, r_max, &[], rule),
        }
    }
}

/// `ω` and `λ` at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub omega: Vec<f64>,
    pub lambda: Vec<Complex64>,
}

/// Evaluates the dispersion and coupling at every node and validates them.
pub fn sample(spec: &ModelSpec, q: &Quadrature) -> Result<Samples> {
    spec.validate()?;
    if spec.dimension != q.dimension() {
        return Err(config("dimension", "model and grid dimensions differ"));
    }
    let n = q.len();
    let omega = match &spec.dispersion {
        Dispersion::AbsK => q.nodes().to_vec(),
        Dispersion::Table(t) => {
            if t.len() != n {
                return Err(Error::Length {
                    expected: n,
                    got: t.len(),
                });
            }
            t.clone()
        }
    };
    if let Some(i) = omega.iter().position(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::Model(format!(
            "dispersion value {} at node {i} is not a non-negative number",
            omega[i]
        )));
    }
    let lambda: Vec<Complex64> = match &spec.coupling {
        Coupling::None => alloc::vec![Complex64::new(0.0, 0.0); n],
        Coupling::SqrtCutoff { cutoff } => {
            if *cutoff > q.r_max() {
                return Err(config(
                    "lambda_cutoff",
                    "cutoff exceeds r_max; the grid would clip the coupling",
                ));
            }
            q.nodes()
                .iter()
                .map(|&r| Complex64::new(if r <= *cutoff { libm::sqrt(r) } else { 0.0 }, 0.0))
                .collect()
        }
        Coupling::SqrtGaussian { width } => q
            .nodes()
            .iter()
            .map(|&r| Complex64::new(libm::sqrt(r) * libm::exp(-r * r / (width * width)), 0.0))
            .collect(),
        Coupling::Table(t) => {
            if t.len() != n {
                return Err(Error::Length {
                    expected: n,
                    got: t.len(),
                });
            }
            if t.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::Model("coupling table has non-finite entries".into()));
            }
            if t.iter().all(|v| v.norm_sqr() == 0.0) {
                return Err(Error::Model(
                    "coupling vanishes at every node; use the explicit decoupled family".into(),
                ));
            }
            t.clone()
        }
    };
    Ok(Samples { omega, lambda })
}

/// A model sampled on a grid: everything the spectral routines need.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    eps: f64,
    alpha: f64,
    quadrature: Quadrature,
    omega: Vec<f64>,
    lambda: Vec<Complex64>,
    /// `√w_i λ_i`, the coupling in weighted coordinates.
    scaled: Vec<Complex64>,
    /// `w_i |λ_i|²`.
    strength: Vec<f64>,
}

impl DiscreteModel {
    pub fn new(spec: &ModelSpec, q: &Quadrature) -> Result<Self> {
        let s = sample(spec, q)?;
        Ok(Self::from_samples(spec.eps, spec.alpha, q.clone(), s))
    }

    fn from_samples(eps: f64, alpha: f64, quadrature: Quadrature, s: Samples) -> Self {
        let scaled: Vec<Complex64> = s
            .lambda
            .iter()
            .zip(quadrature.weights())
            .map(|(l, &w)| l * libm::sqrt(w))
            .collect();
        let strength = s
            .lambda
            .iter()
            .zip(quadrature.weights())
            .map(|(l, &w)| w * l.norm_sqr())
            .collect();
        DiscreteModel {
            eps,
            alpha,
            quadrature,
            omega: s.omega,
            lambda: s.lambda,
            scaled,
            strength,
        }
    }

    /// Direct construction from node values, bypassing the families. The
    /// decoupled case is allowed here.
    pub fn from_values(
        eps: f64,
        alpha: f64,
        q: Quadrature,
        omega: Vec<f64>,
        lambda: Vec<Complex64>,
    ) -> Result<Self> {
        let spec = ModelSpec {
            eps,
            alpha,
            dimension: q.dimension(),
            dispersion: Dispersion::Table(omega.clone()),
            coupling: Coupling::None,
        };
        spec.validate()?;
        let mut s = sample(&spec, &q)?;
        if lambda.len() != q.len() {
            return Err(Error::Length {
                expected: q.len(),
                got: lambda.len(),
            });
        }
        s.lambda = lambda;
        Ok(Self::from_samples(eps, alpha, q, s))
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        DiscreteModel {
            alpha,
            ..self.clone()
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn weights(&self) -> &[f64] {
        self.quadrature.weights()
    }

    pub fn scaled_coupling(&self) -> &[Complex64] {
        &self.scaled
    }

    pub fn strength(&self) -> &[f64] {
        &self.strength
    }

    pub fn is_decoupled(&self) -> bool {
        self.strength.iter().all(|&s| s == 0.0)
    }

    /// `σε`.
    pub fn level(&self, branch: Branch) -> f64 {
        branch.sign() * self.eps
    }

    /// `‖λ‖` on the grid.
    pub fn lambda_norm(&self) -> f64 {
        libm::sqrt(self.strength.iter().sum())
    }

    /// `‖λ/√ω‖²` on the grid; infinite when `λ ≠ 0` at a node with `ω = 0`.
    pub fn ir_norm_sq(&self) -> f64 {
        self.strength
            .iter()
            .zip(&self.omega)
            .map(|(&s, &w)| if s == 0.0 { 0.0 } else { s / w })
            .sum()
    }
}

/// `√(Σ w_i |λ_i|²) ≈ ‖λ‖`.
pub fn lambda_norm(spec: &ModelSpec, q: &Quadrature) -> Result<f64> {
    Ok(DiscreteModel::new(spec, q)?.lambda_norm())
}

/// Norms governing the small-coupling case split of the lower branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrDiagnostics {
    /// `‖λ/√ω‖` on the grid.
    pub ir_norm: f64,
    /// `√(2ε)/‖λ/√ω‖`; `+∞` for a decoupled model.
    pub small_alpha_threshold: f64,
    /// Set when `|λ|²/ω` behaves like `r^{p}` with `p ≤ -d` near the origin,
    /// so the continuum norm diverges and the grid value is an artifact.
    pub infrared_singular: bool,
}

pub fn ir_diagnostics(spec: &ModelSpec, q: &Quadrature) -> Result<IrDiagnostics> {
    let m = DiscreteModel::new(spec, q)?;
    Ok(ir_diagnostics_of(&m))
}

pub fn ir_diagnostics_of(m: &DiscreteModel) -> IrDiagnostics {
    let ir_norm = libm::sqrt(m.ir_norm_sq());
    let small_alpha_threshold = if ir_norm == 0.0 {
        f64::INFINITY
    } else {
        libm::sqrt(2.0 * m.eps()) / ir_norm
    };
    IrDiagnostics {
        ir_norm,
        small_alpha_threshold,
        infrared_singular: infrared_exponent(m).is_some_and(|p| p <= -1.0),
    }
}

/// Local power-law exponent of the radial density `|λ|²/ω · r^{d-1}` at the
/// two smallest nodes carrying coupling. The density is integrable at the
/// origin only for exponents above -1.
fn infrared_exponent(m: &DiscreteModel) -> Option<f64> {
    let d = m.quadrature().dimension() as f64;
    let mut pts = m
        .quadrature()
        .nodes()
        .iter()
        .zip(m.lambda())
        .zip(m.omega())
        .filter(|((_, l), _)| l.norm_sqr() > 0.0)
        .map(|((&r, l), &w)| (r, l.norm_sqr() / w * libm::pow(r, d - 1.0)));
    let (r1, g1) = pts.next()?;
    let (r2, g2) = pts.next()?;
    if !g1.is_finite() {
        return Some(f64::NEG_INFINITY);
    }
    if g2 <= 0.0 || !g2.is_finite() {
        return None;
    }
    Some(libm::log(g2 / g1) / libm::log(r2 / r1))
}
