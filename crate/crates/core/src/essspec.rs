//! Bottom of the essential spectrum.
//!
//! For each branch the threshold `E_{σε}(α)` is the unique zero on
//! `(-∞, σε)` of
//!
//! ```text
//! Φ(z) = -σε - z - α² Σ_i w_i |λ_i|² / (ω_i + σε - z),
//! ```
//!
//! a strictly decreasing function with `Φ → +∞` as `z → -∞`. When the lower
//! branch has no zero the threshold is `-ε` by convention.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Branch, DiscreteModel};

/// Distance `c = σε - z` between the level and the spectral parameter.
pub(crate) fn shift(m: &DiscreteModel, branch: Branch, z: f64) -> Result<f64> {
    let upper = m.level(branch);
    let c = upper - z;
    if !(c > 0.0) || !z.is_finite() {
        return Err(Error::Domain { z, upper });
    }
    Ok(c)
}

pub fn eval_phi(m: &DiscreteModel, branch: Branch, z: f64) -> Result<f64> {
    let c = shift(m, branch, z)?;
    Ok(phi_at_shift(m, c, m.level(branch), z))
}

fn phi_at_shift(m: &DiscreteModel, c: f64, level: f64, z: f64) -> f64 {
    let a2 = m.alpha() * m.alpha();
    let sum: f64 = m
        .strength()
        .iter()
        .zip(m.omega())
        .map(|(&s, &w)| s / (w + c))
        .sum();
    -level - z - a2 * sum
}

/// `Φ'(z) = -1 - α² Σ w_i|λ_i|²/(ω_i + σε - z)²`, always `≤ -1`.
pub fn phi_derivative(m: &DiscreteModel, branch: Branch, z: f64) -> Result<f64> {
    let c = shift(m, branch, z)?;
    let a2 = m.alpha() * m.alpha();
    let sum: f64 = m
        .strength()
        .iter()
        .zip(m.omega())
        .map(|(&s, &w)| s / ((w + c) * (w + c)))
        .sum();
    Ok(-1.0 - a2 * sum)
}

/// `lim_{z ↑ σε} Φ(z) = -2σε - α² Σ w_i|λ_i|²/ω_i`. A zero exists iff this
/// limit is negative.
pub fn phi_upper_limit(m: &DiscreteModel, branch: Branch) -> f64 {
    -2.0 * m.level(branch) - m.alpha() * m.alpha() * m.ir_norm_sq()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// A genuine zero of `Φ`.
    Root,
    /// `Φ` has no zero; the threshold is `-ε` (lower branch only).
    Convention,
}

impl RootKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RootKind::Root => "root",
            RootKind::Convention => "convention",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssSpecResult {
    pub branch: Branch,
    pub value: f64,
    pub kind: RootKind,
    /// `|Φ(value)|`; `None` for the convention branch.
    pub residual: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Bisection stops at width `z_rel_tol · max(1, |z|)`.
    pub z_rel_tol: f64,
    /// Accepted residual `phi_rel_tol · max(1, α²‖λ‖²/(σε - E))`.
    pub phi_rel_tol: f64,
    /// Initial offset below `σε`, relative to `max(1, ε)`.
    pub start_offset: f64,
    pub max_expansions: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            z_rel_tol: 1e-12,
            phi_rel_tol: 1e-10,
            start_offset: 1e-8,
            max_expansions: 200,
        }
    }
}

pub fn find_phi_root(m: &DiscreteModel, branch: Branch) -> Result<EssSpecResult> {
    find_phi_root_with(m, branch, &RootOptions::default())
}

pub fn find_phi_root_with(
    m: &DiscreteModel,
    branch: Branch,
    opts: &RootOptions,
) -> Result<EssSpecResult> {
    let level = m.level(branch);
    let convention = EssSpecResult {
        branch,
        value: -m.eps(),
        kind: RootKind::Convention,
        residual: None,
        iterations: 0,
    };
    if phi_upper_limit(m, branch) >= 0.0 {
        return Ok(convention);
    }
    let phi = |z: f64| eval_phi(m, branch, z);
    let mut iterations = 0;

    // Bracket [lo, hi] with Φ(lo) > 0 > Φ(hi). `hi = level` stands for the
    // negative limit and is never evaluated.
    // A lower-branch zero within `start_offset · ε` of -ε is the conventional
    // threshold to working precision, and the pencil there is too
    // ill-conditioned to count on.
    if branch == Branch::Minus && phi(level - opts.start_offset * m.eps())? >= 0.0 {
        return Ok(convention);
    }
    let z0 = level - opts.start_offset * m.eps().max(1.0);
    let (mut lo, mut hi);
    let f0 = phi(z0)?;
    if f0 == 0.0 {
        return finish(m, branch, z0, iterations, opts);
    }
    if f0 > 0.0 {
        lo = z0;
        hi = level;
    } else {
        hi = z0;
        let mut width = (m.alpha() * m.lambda_norm()).max(1.0);
        loop {
            if iterations >= opts.max_expansions {
                return Err(Error::Numerical(format!(
                    "no sign change of Φ{} found down to z = {} after {iterations} expansions",
                    branch.symbol(),
                    z0 - width
                )));
            }
            iterations += 1;
            let z = z0 - width;
            let f = phi(z)?;
            if f == 0.0 {
                return finish(m, branch, z, iterations, opts);
            }
            if f > 0.0 {
                lo = z;
                break;
            }
            hi = z;
            width *= 4.0;
        }
    }

    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.z_rel_tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let f = phi(mid)?;
        if f == 0.0 {
            return finish(m, branch, mid, iterations, opts);
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish inside the final bracket.
    let mut z = 0.5 * (lo + hi);
    if z >= level {
        z = lo;
    }
    for _ in 0..4 {
        let f = phi(z)?;
        if f == 0.0 {
            break;
        }
        let next = z - f / phi_derivative(m, branch, z)?;
        iterations += 1;
        if !(next > lo && next < hi) || next == z {
            break;
        }
        z = next;
    }
    finish(m, branch, z, iterations, opts)
}

fn finish(
    m: &DiscreteModel,
    branch: Branch,
    z: f64,
    iterations: usize,
    opts: &RootOptions,
) -> Result<EssSpecResult> {
    let residual = eval_phi(m, branch, z)?.abs();
    let c = m.level(branch) - z;
    let scale = (m.alpha() * m.alpha() * m.lambda_norm() * m.lambda_norm() / c).max(1.0);
    if residual > opts.phi_rel_tol * scale {
        return Err(Error::Numerical(format!(
            "Φ{} residual {residual:e} at z = {z} exceeds tolerance {:e}",
            branch.symbol(),
            opts.phi_rel_tol * scale
        )));
    }
    Ok(EssSpecResult {
        branch,
        value: z,
        kind: RootKind::Root,
        residual: Some(residual),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssSpectrumBottom {
    pub plus: EssSpecResult,
    pub minus: EssSpecResult,
    /// `E(α) = min{E_ε(α), E_{-ε}(α)}`.
    pub min: f64,
}

impl EssSpectrumBottom {
    pub fn get(&self, branch: Branch) -> &EssSpecResult {
        match branch {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }
}

pub fn bottom_ess_spectrum(m: &DiscreteModel) -> Result<EssSpectrumBottom> {
    bottom_ess_spectrum_with(m, &RootOptions::default())
}

pub fn bottom_ess_spectrum_with(
    m: &DiscreteModel,
    opts: &RootOptions,
) -> Result<EssSpectrumBottom> {
    let plus = find_phi_root_with(m, Branch::Plus, opts)?;
    let minus = find_phi_root_with(m, Branch::Minus, opts)?;
    let coupled = m.alpha() > 0.0 && !m.is_decoupled();
    let below = if coupled {
        plus.value < -m.eps()
    } else {
        plus.value <= -m.eps() + 1e-12 * m.eps().max(1.0)
    };
    if !below {
        return Err(Error::Numerical(format!(
            "upper threshold {} is not below -ε = {}",
            plus.value,
            -m.eps()
        )));
    }
    Ok(EssSpectrumBottom {
        plus,
        minus,
        min: plus.value.min(minus.value),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub alpha: f64,
    pub branch: Branch,
    pub energy: f64,
    pub kind: RootKind,
    /// `E/α`, tending to `-‖λ‖`.
    pub energy_over_alpha: f64,
    /// `α²/(2(σε - E)²)`, tending to `1/(2‖λ‖²)`.
    pub constant: f64,
}

/// Thresholds along a list of couplings, both branches per coupling.
pub fn asymptotic_report(m: &DiscreteModel, alphas: &[f64]) -> Result<Vec<AsymptoticRow>> {
    let mut rows = Vec::with_capacity(2 * alphas.len());
    for &alpha in alphas {
        let ma = m.with_alpha(alpha);
        for branch in Branch::BOTH {
            let e = find_phi_root(&ma, branch)?;
            let c = ma.level(branch) - e.value;
            rows.push(AsymptoticRow {
                alpha,
                branch,
                energy: e.value,
                kind: e.kind,
                energy_over_alpha: e.value / alpha,
                constant: alpha * alpha / (2.0 * c * c),
            });
        }
    }
    Ok(rows)
}
