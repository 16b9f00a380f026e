//! The Schur-complement pencil on the one-photon sector.
//!
//! Eliminating the vacuum and two-photon sectors of the branch operator at a
//! spectral parameter `z < σε` leaves
//!
//! ```text
//! R(z) = Δ(z) - α² (K1(z) + K2(z)),
//! ```
//!
//! where `Δ` is a multiplication operator, `K1` has rank two and `K2` is
//! controlled by the elementary three-term inequality. All matrices act on
//! weighted coordinates `u_i = √w_i f(r_i)`, so a kernel `p(k1, k2)` becomes
//! the Hermitian matrix `√(w_m w_n) p(r_m, r_n)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::essspec::{eval_phi, shift};
use crate::linalg::{hermitian_eigenvalues, max_abs, real_diagonal, CMatrix};
use crate::model::{Branch, DiscreteModel};

fn domain_check(c: f64) -> Result<()> {
    if !(c > 0.0) {
        return Err(Error::Domain { z: -c, upper: 0.0 });
    }
    Ok(())
}

/// `Ψ1 = 1/(ω1 + c) + 1/(ω2 + c) - 1/c` with `c = σε - z`.
pub fn kernel_psi1(c: f64, w1: f64, w2: f64) -> Result<f64> {
    domain_check(c)?;
    Ok(psi1(c, w1, w2))
}

fn psi1(c: f64, w1: f64, w2: f64) -> f64 {
    1.0 / (w1 + c) + 1.0 / (w2 + c) - 1.0 / c
}

/// `Ψ2 = 1/(ω1 + ω2 + c) - Ψ1`, evaluated in the cancellation-free form
/// `ω1 ω2 (ω1 + ω2 + 2c) / (c (ω1 + c)(ω2 + c)(ω1 + ω2 + c))`.
pub fn kernel_psi2(c: f64, w1: f64, w2: f64) -> Result<f64> {
    domain_check(c)?;
    let v = psi2(c, w1, w2);
    debug_assert!(v >= 0.0 && v <= libm::sqrt(w1 * w2) / (2.0 * c * c) * (1.0 + 1e-12));
    Ok(v)
}

fn psi2(c: f64, w1: f64, w2: f64) -> f64 {
    w1 * w2 * (w1 + w2 + 2.0 * c) / (c * (w1 + c) * (w2 + c) * (w1 + w2 + c))
}

/// Slack on both sides of
/// `0 ≤ 1/(a+b+c) - 1/(a+c) - 1/(b+c) + 1/c ≤ √(ab)/(2c²)`, with the middle
/// term evaluated literally. Returns `(middle, bound - middle)`.
pub fn elementary_inequality_gap(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0) || a < 0.0 || b < 0.0 {
        return Err(Error::Domain { z: -c, upper: 0.0 });
    }
    let middle = 1.0 / (a + b + c) - 1.0 / (a + c) - 1.0 / (b + c) + 1.0 / c;
    let bound = libm::sqrt(a * b) / (2.0 * c * c);
    Ok((middle, bound - middle))
}

/// `Δ(r_i; z) = ω_i - σε - z - α² Σ_q w_q|λ_q|²/(ω_i + ω_q + σε - z)`.
pub fn delta_values(m: &DiscreteModel, branch: Branch, z: f64) -> Result<Vec<f64>> {
    let c = shift(m, branch, z)?;
    let level = m.level(branch);
    let a2 = m.alpha() * m.alpha();
    let values: Vec<f64> = m
        .omega()
        .iter()
        .map(|&wk| {
            let sum: f64 = m
                .strength()
                .iter()
                .zip(m.omega())
                .map(|(&s, &wq)| s / (wk + wq + c))
                .sum();
            wk - level - z - a2 * sum
        })
        .collect();
    debug_assert!(delta_matches_phi(m, branch, z, &values));
    Ok(values)
}

/// `Δ(k; z) = Φ(z - ω(k))`, checked to `1e-12` relative to the term scale.
pub fn delta_matches_phi(m: &DiscreteModel, branch: Branch, z: f64, values: &[f64]) -> bool {
    let level = m.level(branch);
    let a2 = m.alpha() * m.alpha();
    values.iter().zip(m.omega()).all(|(&d, &wk)| {
        let Ok(phi) = eval_phi(m, branch, z - wk) else {
            return false;
        };
        let c = level - z + wk;
        let scale = wk.abs() + level.abs() + z.abs() + a2 * m.strength().iter().sum::<f64>() / c;
        (phi - d).abs() <= 1e-12 * scale.max(1.0)
    })
}

fn hermitian_from_kernel(m: &DiscreteModel, kernel: impl Fn(usize, usize) -> f64) -> CMatrix {
    let n = m.len();
    let u = m.scaled_coupling();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = u[i].conj() * u[j] * kernel(i, j);
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// Rank-two part, kernel `λ̄(k1)λ(k2)[1/(ω1 + c) + 1/(ω2 + c)]`.
pub fn assemble_k1(m: &DiscreteModel, branch: Branch, z: f64) -> Result<CMatrix> {
    let c = shift(m, branch, z)?;
    let w = m.omega();
    Ok(hermitian_from_kernel(m, |i, j| {
        1.0 / (w[i] + c) + 1.0 / (w[j] + c)
    }))
}

/// Remainder, kernel `λ̄(k1)λ(k2)Ψ2(k1, k2)`.
pub fn assemble_k2(m: &DiscreteModel, branch: Branch, z: f64) -> Result<CMatrix> {
    let c = shift(m, branch, z)?;
    let w = m.omega();
    Ok(hermitian_from_kernel(m, |i, j| psi2(c, w[i], w[j])))
}

/// The full integral kernel
/// `p(k1, k2) = λ̄(k1)λ(k2)[1/(ω1 + ω2 + c) + 1/c]`, assembled directly.
pub fn kernel_matrix(m: &DiscreteModel, branch: Branch, z: f64) -> Result<CMatrix> {
    let c = shift(m, branch, z)?;
    let w = m.omega();
    Ok(hermitian_from_kernel(m, |i, j| {
        1.0 / (w[i] + w[j] + c) + 1.0 / c
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PencilAssembly {
    pub branch: Branch,
    pub z: f64,
    pub alpha: f64,
    pub delta: Vec<f64>,
    pub k1: CMatrix,
    pub k2: CMatrix,
    pub r: CMatrix,
}

impl PencilAssembly {
    /// Largest entrywise deviation of `α²(K1 + K2)` from the directly
    /// assembled kernel matrix, relative to the largest kernel entry.
    pub fn decomposition_defect(&self, m: &DiscreteModel) -> Result<f64> {
        let direct = kernel_matrix(m, self.branch, self.z)?;
        let split = &self.k1 + &self.k2;
        let diff = max_abs(&(&split - &direct));
        Ok(diff / max_abs(&direct).max(f64::MIN_POSITIVE))
    }

    /// Largest deviation of `r` from `diag(Δ) - α²(K1 + K2)`.
    pub fn split_defect(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        let rebuilt = real_diagonal(&self.delta) - (&self.k1 + &self.k2) * Complex64::new(a2, 0.0);
        max_abs(&(&self.r - &rebuilt)) / max_abs(&self.r).max(1.0)
    }
}

pub fn assemble_r(m: &DiscreteModel, branch: Branch, z: f64) -> Result<PencilAssembly> {
    let delta = delta_values(m, branch, z)?;
    let k1 = assemble_k1(m, branch, z)?;
    let k2 = assemble_k2(m, branch, z)?;
    let a2 = Complex64::new(m.alpha() * m.alpha(), 0.0);
    let mut r = (&k1 + &k2) * (-a2);
    for (i, d) in delta.iter().enumerate() {
        r[(i, i)] += d;
    }
    Ok(PencilAssembly {
        branch,
        z,
        alpha: m.alpha(),
        delta,
        k1,
        k2,
        r,
    })
}

/// Matrix of the rank-two part in the basis `{λ̄, λ̄/(ω + c)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTwoMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl RankTwoMatrix {
    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Eigenvalues `m11 ± √(m12 m21)`, larger first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = 0.5 * (self.m11 + self.m22);
        let disc =
            libm::sqrt((0.25 * (self.m11 - self.m22).powi(2) + self.m12 * self.m21).max(0.0));
        (tr + disc, tr - disc)
    }

    /// Number of positive and negative eigenvalues.
    pub fn inertia(&self) -> (usize, usize) {
        let (a, b) = self.eigenvalues();
        let pos = usize::from(a > 0.0) + usize::from(b > 0.0);
        let neg = usize::from(a < 0.0) + usize::from(b < 0.0);
        (pos, neg)
    }
}

pub fn rank_two_matrix(m: &DiscreteModel, branch: Branch, e: f64) -> Result<RankTwoMatrix> {
    let c = shift(m, branch, e)?;
    let (mut m11, mut m12, mut m21) = (0.0, 0.0, 0.0);
    for (&s, &w) in m.strength().iter().zip(m.omega()) {
        m11 += s / (w + c);
        m12 += s / ((w + c) * (w + c));
        m21 += s;
    }
    Ok(RankTwoMatrix {
        m11,
        m12,
        m21,
        m22: m11,
    })
}

/// Negative-eigenvalue count with an explicit zero band.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub branch: Option<Branch>,
    pub z: Option<f64>,
    /// Eigenvalues below `-tolerance`.
    pub count: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
    /// Eigenvalues inside `[-tolerance, tolerance]`.
    pub flagged: usize,
}

impl CountReport {
    pub fn at(mut self, branch: Branch, z: f64) -> Self {
        self.branch = Some(branch);
        self.z = Some(z);
        self
    }
}

/// Default zero band `rel · (1 + max |m_ij|)`.
pub fn band_tolerance(m: &CMatrix, rel: f64) -> f64 {
    rel * (1.0 + max_abs(m))
}

pub fn count_negative_eigs(matrix: &CMatrix, tol: f64) -> Result<CountReport> {
    let eigenvalues = hermitian_eigenvalues(matrix)?;
    let count = eigenvalues.iter().filter(|&&v| v < -tol).count();
    let flagged = eigenvalues.iter().filter(|&&v| v.abs() <= tol).count();
    Ok(CountReport {
        branch: None,
        z: None,
        count,
        eigenvalues,
        tolerance: tol,
        flagged,
    })
}

/// `N(0; R(z))` with the zero band `rel · (1 + ‖R‖_max)`.
pub fn count_pencil(m: &DiscreteModel, branch: Branch, z: f64, rel: f64) -> Result<CountReport> {
    let r = assemble_r(m, branch, z)?.r;
    Ok(count_negative_eigs(&r, band_tolerance(&r, rel))?.at(branch, z))
}

/// Smallest eigenvalue of `diag(Δ(E)) - α² K2(E)`.
pub fn positivity_margin(m: &DiscreteModel, branch: Branch, e: f64) -> Result<f64> {
    let delta = delta_values(m, branch, e)?;
    let k2 = assemble_k2(m, branch, e)?;
    let op = real_diagonal(&delta) - k2 * Complex64::new(m.alpha() * m.alpha(), 0.0);
    let values = hermitian_eigenvalues(&op)?;
    Ok(values.first().copied().unwrap_or(f64::INFINITY))
}

fn quadratic_form(a: &CMatrix, v: &[Complex64]) -> f64 {
    let n = v.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += a[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

/// Central finite-difference slope of `z ↦ ⟨R(z)φ, φ⟩`, step `1e-4 (σε - z)`.
pub fn pencil_slope_check(
    m: &DiscreteModel,
    branch: Branch,
    z: f64,
    probe: &[Complex64],
) -> Result<f64> {
    let c = shift(m, branch, z)?;
    if probe.len() != m.len() {
        return Err(Error::Length {
            expected: m.len(),
            got: probe.len(),
        });
    }
    let h = 1e-4 * c;
    let up = quadratic_form(&assemble_r(m, branch, z + h)?.r, probe);
    let down = quadratic_form(&assemble_r(m, branch, z - h)?.r, probe);
    Ok((up - down) / (2.0 * h))
}

/// Exact slope: `⟨R'(z)φ, φ⟩` with
/// `R'(z) = -I - α²[diag(Σ_q w_q|λ_q|²/(ω_k+ω_q+c)²) + kernel λ̄λ(1/(ω1+ω2+c)² + 1/c²)]`.
pub fn pencil_slope_exact(
    m: &DiscreteModel,
    branch: Branch,
    z: f64,
    probe: &[Complex64],
) -> Result<f64> {
    let c = shift(m, branch, z)?;
    if probe.len() != m.len() {
        return Err(Error::Length {
            expected: m.len(),
            got: probe.len(),
        });
    }
    let w = m.omega();
    let a2 = m.alpha() * m.alpha();
    let mut d = hermitian_from_kernel(m, |i, j| {
        let s = w[i] + w[j] + c;
        1.0 / (s * s) + 1.0 / (c * c)
    }) * Complex64::new(-a2, 0.0);
    for (k, &wk) in w.iter().enumerate() {
        let sum: f64 = m
            .strength()
            .iter()
            .zip(w)
            .map(|(&s, &wq)| s / ((wk + wq + c) * (wk + wq + c)))
            .sum();
        d[(k, k)] -= 1.0 + a2 * sum;
    }
    Ok(quadratic_form(&d, probe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::essspec::{find_phi_root, RootKind};
    use crate::linalg::hermitian_singular_values;
    use crate::model::ModelSpec;
    use crate::quadrature::{Quadrature, Rule};
    use alloc::vec;
    use approx::assert_relative_eq;

    fn toy(alpha: f64) -> DiscreteModel {
        let q = Quadrature::from_parts(1, vec![1.0], vec![4.0], 2.0).unwrap();
        DiscreteModel::from_values(1.0, alpha, q, vec![1.0], vec![Complex64::new(1.0, 0.0)])
            .unwrap()
    }

    fn default_model(alpha: f64, n: usize) -> DiscreteModel {
        let spec = ModelSpec::default().with_alpha(alpha);
        let q = spec.grid(n, 4.0, Rule::GaussLegendre).unwrap();
        DiscreteModel::new(&spec, &q).unwrap()
    }

    #[test]
    fn psi_arithmetic() {
        assert_relative_eq!(
            kernel_psi1(3.0, 0.0, 0.0).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-16
        );
        assert_eq!(kernel_psi1(1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            kernel_psi1(2.0, 1.0, 0.0).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-16
        );
        assert_eq!(kernel_psi2(1.0, 0.0, 5.0).unwrap(), 0.0);
        assert_relative_eq!(
            kernel_psi2(1.0, 1.0, 1.0).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-16
        );
        assert_relative_eq!(
            kernel_psi2(2.0, 4.0, 1.0).unwrap(),
            1.0 / 7.0,
            epsilon = 1e-16
        );
        assert!(kernel_psi1(0.0, 1.0, 1.0).is_err());
        assert!(kernel_psi2(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn psi2_matches_literal_difference() {
        for &(c, a, b) in &[(1.0, 0.3, 2.0), (0.5, 7.0, 7.0), (10.0, 0.01, 3.0)] {
            let literal = 1.0 / (a + b + c) - psi1(c, a, b);
            assert_relative_eq!(kernel_psi2(c, a, b).unwrap(), literal, max_relative = 1e-12);
        }
    }

    #[test]
    fn elementary_gaps() {
        let (lo, hi) = elementary_inequality_gap(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(lo, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(hi, 1.0 / 6.0, epsilon = 1e-15);
        for b in [0.0, 0.5, 30.0] {
            let (lo, _) = elementary_inequality_gap(0.0, b, 2.0).unwrap();
            assert_eq!(lo, 0.0);
        }
        let (lo, hi) = elementary_inequality_gap(1e4, 1e4, 1.0).unwrap();
        assert!(lo > 0.9 && hi > 0.0);
        assert!(elementary_inequality_gap(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn delta_on_the_toy() {
        let m = toy(1.0);
        let d = delta_values(&m, Branch::Plus, -2.0).unwrap();
        assert_relative_eq!(d[0], 1.2, epsilon = 1e-15);
        let zero = default_model(0.0, 8);
        let d = delta_values(&zero, Branch::Minus, -1.5).unwrap();
        for (v, w) in d.iter().zip(zero.omega()) {
            assert_relative_eq!(*v, w + 1.0 + 1.5, epsilon = 1e-14);
        }
        assert!(delta_values(&m, Branch::Minus, -1.0).is_err());
    }

    #[test]
    fn delta_dominates_omega_at_threshold() {
        for alpha in [1.0, 10.0, 100.0] {
            let m = default_model(alpha, 32);
            for branch in Branch::BOTH {
                let e = find_phi_root(&m, branch).unwrap();
                // α = 1 sits exactly on the lower-branch threshold of this grid.
                let z = match e.kind {
                    RootKind::Root => e.value,
                    RootKind::Convention => -m.eps() * (1.0 + 1e-8),
                };
                let d = delta_values(&m, branch, z).unwrap();
                assert!(delta_matches_phi(&m, branch, z, &d));
                for (v, w) in d.iter().zip(m.omega()) {
                    assert!(*v >= w - 1e-10);
                }
            }
        }
    }

    #[test]
    fn one_node_matrices() {
        let m = toy(1.0);
        let z = -2.0;
        let c = 3.0;
        let k1 = assemble_k1(&m, Branch::Plus, z).unwrap();
        assert_relative_eq!(k1[(0, 0)].re, 2.0 * 4.0 / (1.0 + c), epsilon = 1e-15);
        let k2 = assemble_k2(&m, Branch::Plus, z).unwrap();
        assert_relative_eq!(k2[(0, 0)].re, 4.0 * psi2(c, 1.0, 1.0), epsilon = 1e-15);
        let p = assemble_r(&m, Branch::Plus, z).unwrap();
        // R = Δ - α² w|λ|² (1/(2ω+c) + 1/c)
        assert_relative_eq!(
            p.r[(0, 0)].re,
            1.2 - 4.0 * (1.0 / 5.0 + 1.0 / 3.0),
            epsilon = 1e-14
        );
        let rt = rank_two_matrix(&m, Branch::Plus, z).unwrap();
        assert_eq!(rt.det(), 0.0);
    }

    #[test]
    fn decoupled_pencil_is_diagonal() {
        let m = default_model(0.0, 6);
        let p = assemble_r(&m, Branch::Plus, -1.3).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j {
                    m.omega()[i] - 1.0 + 1.3
                } else {
                    0.0
                };
                assert_relative_eq!(p.r[(i, j)].re, expect, epsilon = 1e-14);
            }
        }
        let q = Quadrature::from_parts(1, vec![0.5, 1.0], vec![1.0, 1.0], 2.0).unwrap();
        let flat = DiscreteModel::from_values(
            1.0,
            2.0,
            q,
            vec![0.0, 0.0],
            vec![Complex64::new(1.0, 0.0); 2],
        )
        .unwrap();
        assert_eq!(
            max_abs(&assemble_k2(&flat, Branch::Plus, 0.0).unwrap()),
            0.0
        );
    }

    #[test]
    fn decomposition_and_split_identities() {
        let m = default_model(3.0, 12);
        for branch in Branch::BOTH {
            for z in [-40.0, -5.0, -1.2] {
                let p = assemble_r(&m, branch, z).unwrap();
                assert!(p.decomposition_defect(&m).unwrap() <= 1e-12);
                assert!(p.split_defect() <= 1e-13);
            }
        }
    }

    #[test]
    fn k1_has_rank_two_and_matches_the_two_by_two() {
        let m = default_model(5.0, 24);
        for branch in Branch::BOTH {
            let e = find_phi_root(&m, branch).unwrap().value;
            let k1 = assemble_k1(&m, branch, e).unwrap();
            let s = hermitian_singular_values(&k1).unwrap();
            assert!(s[2] <= 1e-10 * s[0]);
            let rt = rank_two_matrix(&m, branch, e).unwrap();
            assert!(rt.det() < 0.0);
            assert_eq!(rt.inertia(), (1, 1));
            let (hi, lo) = rt.eigenvalues();
            let eig = hermitian_eigenvalues(&k1).unwrap();
            assert_relative_eq!(eig[eig.len() - 1], hi, max_relative = 1e-10);
            assert_relative_eq!(eig[0], lo, max_relative = 1e-8);
        }
    }

    #[test]
    fn counting_with_a_band() {
        let m = real_diagonal(&[1.0, -1.0, 0.0]);
        let r = count_negative_eigs(&m, 1e-10).unwrap();
        assert_eq!((r.count, r.flagged), (1, 1));
        assert_eq!(r.eigenvalues, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn minus_k1_has_one_negative_eigenvalue() {
        for alpha in [5.0, 50.0, 500.0] {
            let m = default_model(alpha, 16);
            for branch in Branch::BOTH {
                let e = find_phi_root(&m, branch).unwrap().value;
                let k1 = assemble_k1(&m, branch, e).unwrap() * Complex64::new(-alpha * alpha, 0.0);
                let report = count_negative_eigs(&k1, band_tolerance(&k1, 1e-9)).unwrap();
                assert_eq!(report.count, 1);
            }
        }
    }

    #[test]
    fn strong_coupling_margin_and_count() {
        let m = default_model(100.0, 32);
        for branch in Branch::BOTH {
            let e = find_phi_root(&m, branch).unwrap().value;
            assert!(positivity_margin(&m, branch, e).unwrap() >= -1e-8 * 100.0);
            assert!(count_pencil(&m, branch, e, 1e-9).unwrap().count <= 1);
        }
    }

    #[test]
    fn slopes() {
        let m0 = default_model(0.0, 8);
        let probe: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(i as f64 - 3.0, 0.5))
            .collect();
        let norm: f64 = probe.iter().map(|v| v.norm_sqr()).sum();
        assert_relative_eq!(
            pencil_slope_check(&m0, Branch::Plus, -2.0, &probe).unwrap(),
            -norm,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            pencil_slope_exact(&m0, Branch::Plus, -2.0, &probe).unwrap(),
            -norm,
            max_relative = 1e-14
        );

        // one node: R(z) = ω - σε - z - α² w|λ|² (2/(2ω + c) + 1/c)
        let t = toy(1.5);
        let z = -3.0;
        let c = 4.0;
        let phi = [Complex64::new(0.7, -0.2)];
        let nrm = phi[0].norm_sqr();
        let exact = -nrm - 2.25 * 4.0 * (2.0 / ((2.0 + c) * (2.0 + c)) + 1.0 / (c * c)) * nrm;
        assert_relative_eq!(
            pencil_slope_exact(&t, Branch::Plus, z, &phi).unwrap(),
            exact,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            pencil_slope_check(&t, Branch::Plus, z, &phi).unwrap(),
            exact,
            max_relative = 1e-7
        );

        let m = default_model(4.0, 16);
        let probe: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        for branch in Branch::BOTH {
            let s = pencil_slope_check(&m, branch, m.level(branch) - 2.0, &probe).unwrap();
            let x = pencil_slope_exact(&m, branch, m.level(branch) - 2.0, &probe).unwrap();
            assert!(s < 0.0);
            assert_relative_eq!(s, x, max_relative = 1e-7);
        }
    }

    #[test]
    fn complex_coupling_is_a_gauge() {
        // A node-wise phase on λ is a diagonal unitary: spectra are unchanged.
        let spec = ModelSpec::default().with_alpha(6.0);
        let q = spec.grid(10, 4.0, Rule::GaussLegendre).unwrap();
        let real = DiscreteModel::new(&spec, &q).unwrap();
        let phased: Vec<Complex64> = real
            .lambda()
            .iter()
            .enumerate()
            .map(|(i, l)| l * Complex64::from_polar(1.0, 0.7 * i as f64))
            .collect();
        let cplx = DiscreteModel::from_values(1.0, 6.0, q, real.omega().to_vec(), phased).unwrap();
        for branch in Branch::BOTH {
            let z = real.level(branch) - 3.0;
            let a = hermitian_eigenvalues(&assemble_r(&real, branch, z).unwrap().r).unwrap();
            let b = hermitian_eigenvalues(&assemble_r(&cplx, branch, z).unwrap().r).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_relative_eq!(x, y, epsilon = 1e-10);
            }
        }
    }
}
