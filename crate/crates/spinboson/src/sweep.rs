//! Coupling sweeps: one independent row per `α`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spinboson_core::oracle::{branch_count, evaluation_point};
use spinboson_core::{
    find_phi_root_with, positivity_margin, rank_two_matrix, Branch, CountOptions, DiscreteModel,
    EssSpecResult,
};

use crate::config::RunConfig;
use crate::error::CliError;

/// CSV column order; `SweepRow` fields serialise in this order.
pub const HEADER: [&str; 14] = [
    "alpha",
    "e_plus",
    "e_minus",
    "e_min",
    "kind_minus",
    "count_plus",
    "count_minus",
    "total",
    "margin_plus",
    "margin_minus",
    "mdet_plus",
    "mdet_minus",
    "slope_ratio",
    "flags",
];

/// Empty cells mark quantities a row could not compute; `flags` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub e_plus: Option<f64>,
    pub e_minus: Option<f64>,
    pub e_min: Option<f64>,
    pub kind_minus: Option<String>,
    pub count_plus: Option<usize>,
    pub count_minus: Option<usize>,
    pub total: Option<usize>,
    pub margin_plus: Option<f64>,
    pub margin_minus: Option<f64>,
    pub mdet_plus: Option<f64>,
    pub mdet_minus: Option<f64>,
    /// `(E/α) / (-‖λ‖)`, tending to 1 at strong coupling.
    pub slope_ratio: Option<f64>,
    /// `;`-separated notes: zero-band hits, informational counts, errors.
    pub flags: String,
}

#[derive(Default)]
struct BranchCells {
    energy: Option<f64>,
    count: Option<usize>,
    margin: Option<f64>,
    mdet: Option<f64>,
}

fn finite(v: f64, what: &str, name: &str, flags: &mut Vec<String>) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        flags.push(format!("{what}_{name}_nonfinite"));
        None
    }
}

fn branch_cells(
    m: &DiscreteModel,
    e: &EssSpecResult,
    opts: &CountOptions,
    flags: &mut Vec<String>,
) -> BranchCells {
    let name = e.branch.name();
    let mut cells = BranchCells {
        energy: Some(e.value),
        ..BranchCells::default()
    };
    let (z, informational) = evaluation_point(m, e, opts.guard);
    if informational {
        flags.push(format!("informational_{name}"));
    }
    match branch_count(m, e, opts) {
        Ok(c) => {
            if c.pencil.flagged > 0 {
                flags.push(format!("flagged_{name}={}", c.pencil.flagged));
            }
            if let Some(d) = &c.direct {
                if d.flagged > 0 {
                    flags.push(format!("direct_flagged_{name}={}", d.flagged));
                }
                if d.count != c.pencil.count {
                    flags.push(format!("direct_mismatch_{name}={}", d.count));
                }
            }
            cells.count = Some(c.count());
        }
        Err(err) => flags.push(format!("count_{name}_failed: {err}")),
    }
    match positivity_margin(m, e.branch, z) {
        Ok(v) => cells.margin = finite(v, "margin", name, flags),
        Err(err) => flags.push(format!("margin_{name}_failed: {err}")),
    }
    match rank_two_matrix(m, e.branch, z) {
        Ok(r) => cells.mdet = finite(r.det(), "mdet", name, flags),
        Err(err) => flags.push(format!("mdet_{name}_failed: {err}")),
    }
    cells
}

/// Computes one sweep row; failures are recorded in `flags` and never abort.
pub fn sweep_row(base: &DiscreteModel, alpha: f64, opts: &CountOptions) -> SweepRow {
    let m = base.with_alpha(alpha);
    let mut flags = Vec::new();
    let mut kind_minus = None;
    let mut cells = [BranchCells::default(), BranchCells::default()];
    for (slot, branch) in cells.iter_mut().zip(Branch::BOTH) {
        match find_phi_root_with(&m, branch, &opts.root) {
            Ok(e) => {
                if branch == Branch::Minus {
                    kind_minus = Some(e.kind.as_str().to_string());
                }
                *slot = branch_cells(&m, &e, opts, &mut flags);
            }
            Err(err) => flags.push(format!("threshold_{}_failed: {err}", branch.name())),
        }
    }
    let [plus, minus] = cells;
    let e_min = match (plus.energy, minus.energy) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => None,
    };
    let norm = m.lambda_norm();
    let slope_ratio = match e_min {
        Some(e) if alpha > 0.0 && norm > 0.0 => Some(e / alpha / -norm),
        _ => None,
    };
    SweepRow {
        alpha,
        e_plus: plus.energy,
        e_minus: minus.energy,
        e_min,
        kind_minus,
        count_plus: plus.count,
        count_minus: minus.count,
        total: plus.count.zip(minus.count).map(|(a, b)| a + b),
        margin_plus: plus.margin,
        margin_minus: minus.margin,
        mdet_plus: plus.mdet,
        mdet_minus: minus.mdet,
        slope_ratio,
        flags: flags.join(";"),
    }
}

/// Rows in configured `α` order, computed in parallel.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let base = cfg.discrete_model()?;
    let opts = cfg.count_options();
    Ok(cfg
        .sweep
        .alphas()
        .par_iter()
        .map(|&alpha| sweep_row(&base, alpha, &opts))
        .collect())
}
