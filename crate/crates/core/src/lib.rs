//! Essential-spectrum bottom and bound-state counting for the spin-boson
//! Hamiltonian restricted to at most two photons.
//!
//! The Hamiltonian splits into two branch operators `H^(σ)`, `σ = ±`, each a
//! 3×3 operator matrix on `C ⊕ L² ⊕ L²_s`. For rotationally invariant
//! dispersion and coupling every quantity reduces to radial quadrature:
//!
//! * [`quadrature`] builds the radial rules,
//! * [`model`] samples `ω` and `λ` on a grid,
//! * [`essspec`] locates the essential-spectrum thresholds `E_{σε}(α)`,
//! * [`pencil`] assembles the Schur-complement pencil `R(z)` and counts its
//!   negative eigenvalues,
//! * [`oracle`] assembles the full branch operator and counts directly.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod essspec;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod pencil;
pub mod quadrature;

pub use error::{Error, Result};
pub use essspec::{
    asymptotic_report, bottom_ess_spectrum, bottom_ess_spectrum_with, eval_phi, find_phi_root,
    find_phi_root_with, phi_derivative, EssSpecResult, EssSpectrumBottom, RootKind, RootOptions,
};
pub use linalg::CMatrix;
pub use model::{
    ir_diagnostics, ir_diagnostics_of, lambda_norm, sample, Branch, Coupling, DiscreteModel,
    Dispersion, ModelSpec,
};
pub use num_complex::Complex64;
pub use oracle::{assemble_block, eig_below, total_count, BlockOperator, CountOptions, TotalCount};
pub use pencil::{
    assemble_k1, assemble_k2, assemble_r, count_negative_eigs, count_pencil, delta_values,
    positivity_margin, rank_two_matrix, CountReport, PencilAssembly, RankTwoMatrix,
};
pub use quadrature::{build_radial_grid, Quadrature, Rule};
