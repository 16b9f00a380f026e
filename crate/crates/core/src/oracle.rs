//! Direct discretization of the branch operator on
//! `C ⊕ (one-photon grid) ⊕ (symmetric two-photon grid)`.
//!
//! Two-photon amplitudes are stored as `v_ij = √(w_i w_j) f(r_i, r_j)` for
//! `i < j` and `v_ii = (w_i/√2) f(r_i, r_i)`, which turns the half-weighted
//! inner product of the symmetric sector into the plain dot product. With
//! these coordinates the matrix is Hermitian and its Schur complement onto the
//! one-photon sector is exactly the pencil matrix `R(z)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::essspec::{bottom_ess_spectrum_with, EssSpecResult, RootKind, RootOptions};
use crate::linalg::{max_abs, CMatrix};
use crate::model::{Branch, DiscreteModel};
use crate::pencil::{count_negative_eigs, count_pencil, CountReport};

/// Largest grid size the direct solver accepts by default.
pub const DEFAULT_DIRECT_CAP: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    pub branch: Branch,
    /// Number of one-photon nodes.
    pub n: usize,
    pub matrix: CMatrix,
    /// Two-photon index pairs `(i, j)`, `i ≤ j`, in matrix order after the
    /// vacuum row and the `n` one-photon rows.
    pub pairs: Vec<(usize, usize)>,
}

impl BlockOperator {
    pub fn dim(&self) -> usize {
        1 + self.n + self.pairs.len()
    }

    pub fn one_photon_range(&self) -> core::ops::Range<usize> {
        1..1 + self.n
    }

    /// Indices of the vacuum and two-photon sectors.
    pub fn outer_indices(&self) -> impl Iterator<Item = usize> + '_ {
        core::iter::once(0).chain(1 + self.n..self.dim())
    }
}

pub fn assemble_block(m: &DiscreteModel, branch: Branch) -> BlockOperator {
    let n = m.len();
    let level = m.level(branch);
    let alpha = m.alpha();
    let w = m.omega();
    let u = m.scaled_coupling();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let dim = 1 + n + pairs.len();
    let mut h = CMatrix::zeros(dim, dim);
    let set = |h: &mut CMatrix, row: usize, col: usize, v: Complex64| {
        h[(row, col)] = v;
        h[(col, row)] = v.conj();
    };

    set(&mut h, 0, 0, Complex64::new(level, 0.0));
    for i in 0..n {
        h[(1 + i, 1 + i)] = Complex64::new(-level + w[i], 0.0);
        // one-photon row, vacuum column: α √w_i λ̄_i
        set(&mut h, 1 + i, 0, u[i].conj() * alpha);
    }
    let root2 = core::f64::consts::SQRT_2;
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let row = 1 + n + p;
        h[(row, row)] = Complex64::new(level + w[i] + w[j], 0.0);
        if i == j {
            set(&mut h, row, 1 + i, u[i].conj() * (alpha * root2));
        } else {
            // (H21 f)(k1, k2) = λ̄(k1) f(k2) + λ̄(k2) f(k1)
            set(&mut h, row, 1 + j, u[i].conj() * alpha);
            set(&mut h, row, 1 + i, u[j].conj() * alpha);
        }
    }
    BlockOperator {
        branch,
        n,
        matrix: h,
        pairs,
    }
}

/// Schur complement of `H - z` onto the one-photon sector, computed from the
/// assembled block: `H11 - z - Σ_o H[·,o] H[o,·] / (H[o,o] - z)` over the
/// vacuum and two-photon indices `o` (both sectors are diagonal).
pub fn schur_complement(block: &BlockOperator, z: f64) -> Result<CMatrix> {
    let h = &block.matrix;
    let n = block.n;
    let mut s = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            s[(a, b)] = h[(1 + a, 1 + b)];
        }
        s[(a, a)] -= z;
    }
    for o in block.outer_indices() {
        let d = h[(o, o)].re - z;
        if !(d > 0.0) {
            return Err(Error::Domain {
                z,
                upper: h[(o, o)].re,
            });
        }
        for a in 0..n {
            let left = h[(1 + a, o)];
            if left == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..n {
                s[(a, b)] -= left * h[(o, 1 + b)] / d;
            }
        }
    }
    Ok(s)
}

/// Eigenvalues of the block below `z`, counted as negative eigenvalues of
/// `H - z` with zero band `rel · (1 + ‖H - z‖_max)`.
pub fn eig_below(block: &BlockOperator, z: f64, rel: f64) -> Result<CountReport> {
    let mut shifted = block.matrix.clone();
    for i in 0..block.dim() {
        shifted[(i, i)] -= z;
    }
    let tol = rel * (1.0 + max_abs(&shifted));
    Ok(count_negative_eigs(&shifted, tol)?.at(block.branch, z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountOptions {
    /// Relative width of the zero band.
    pub eig_rel_tol: f64,
    /// Offset below `-ε`, relative to `ε`, used when the lower threshold is
    /// the conventional one.
    pub guard: f64,
    /// Direct solves are skipped above this many nodes.
    pub direct_cap: usize,
    pub root: RootOptions,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            eig_rel_tol: 1e-9,
            guard: 1e-8,
            direct_cap: DEFAULT_DIRECT_CAP,
            root: RootOptions::default(),
        }
    }
}

/// Point where a branch is counted: the threshold itself when it is a root of
/// `Φ`, otherwise `-ε(1 + guard)`. The second flag marks the latter case as
/// informational.
pub fn evaluation_point(m: &DiscreteModel, ess: &EssSpecResult, guard: f64) -> (f64, bool) {
    match ess.kind {
        RootKind::Root => (ess.value, false),
        RootKind::Convention => (-m.eps() - guard * m.eps(), true),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchCount {
    pub branch: Branch,
    pub threshold: EssSpecResult,
    pub z: f64,
    pub pencil: CountReport,
    pub direct: Option<CountReport>,
    /// The count was taken below the conventional threshold.
    pub informational: bool,
}

impl BranchCount {
    pub fn count(&self) -> usize {
        self.pencil.count
    }

    /// Zero-band hits in either solve, or disagreement between the two.
    pub fn ambiguous(&self) -> bool {
        self.pencil.flagged > 0
            || self
                .direct
                .as_ref()
                .is_some_and(|d| d.flagged > 0 || d.count != self.pencil.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalCount {
    pub plus: BranchCount,
    pub minus: BranchCount,
    pub total: usize,
    pub ambiguous: bool,
}

pub fn branch_count(
    m: &DiscreteModel,
    ess: &EssSpecResult,
    opts: &CountOptions,
) -> Result<BranchCount> {
    let (z, informational) = evaluation_point(m, ess, opts.guard);
    let pencil = count_pencil(m, ess.branch, z, opts.eig_rel_tol)?;
    let direct = if m.len() <= opts.direct_cap {
        Some(eig_below(
            &assemble_block(m, ess.branch),
            z,
            opts.eig_rel_tol,
        )?)
    } else {
        None
    };
    Ok(BranchCount {
        branch: ess.branch,
        threshold: *ess,
        z,
        pencil,
        direct,
        informational,
    })
}

/// Counts below `E_{σε}(α)` for both branches and their sum, the upper bound
/// on the number of bound states below `E(α)`.
pub fn total_count(m: &DiscreteModel, opts: &CountOptions) -> Result<TotalCount> {
    let bottom = bottom_ess_spectrum_with(m, &opts.root)?;
    let plus = branch_count(m, &bottom.plus, opts)?;
    let minus = branch_count(m, &bottom.minus, opts)?;
    let ambiguous = plus.ambiguous() || minus.ambiguous();
    Ok(TotalCount {
        total: plus.count() + minus.count(),
        plus,
        minus,
        ambiguous,
    })
}
