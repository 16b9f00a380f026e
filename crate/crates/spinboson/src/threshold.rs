//! Locates the strong-coupling regime by a geometric scan in `α`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spinboson_core::oracle::evaluation_point;
use spinboson_core::{
    count_pencil, find_phi_root_with, ir_diagnostics_of, positivity_margin, Branch, CountOptions,
    DiscreteModel, RootKind,
};

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCAN_START: f64 = 1e-2;
pub const SCAN_CAP: f64 = 1e4;
pub const STEPS_PER_DECADE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub scan_start: f64,
    pub scan_cap: f64,
    /// Ratio between consecutive scanned couplings.
    pub scan_factor: f64,
    /// Smallest scanned `α` from which the lower branch has a genuine root.
    pub root_minus: Option<f64>,
    /// `√(2ε)/‖λ/√ω‖`, the prediction for `root_minus`.
    pub root_minus_predicted: Option<f64>,
    /// Smallest scanned `α` from which both positivity margins are `≥ 0`.
    pub positivity: Option<f64>,
    /// Smallest scanned `α` from which the total count is at most two.
    pub count_at_most_two: Option<f64>,
    /// Smallest scanned `α` from which no count has zero-band hits.
    pub unflagged: Option<f64>,
    /// Scanned points where a computation failed.
    pub failures: Vec<String>,
}

struct Point {
    alpha: f64,
    root_minus: bool,
    positive: bool,
    at_most_two: bool,
    unflagged: bool,
    failure: Option<String>,
}

fn scan_point(base: &DiscreteModel, alpha: f64, opts: &CountOptions) -> Point {
    let m = base.with_alpha(alpha);
    let mut p = Point {
        alpha,
        root_minus: false,
        positive: true,
        at_most_two: true,
        unflagged: true,
        failure: None,
    };
    let mut total = 0;
    for branch in Branch::BOTH {
        let step = || -> spinboson_core::Result<(bool, f64, usize, usize)> {
            let e = find_phi_root_with(&m, branch, &opts.root)?;
            let (z, _) = evaluation_point(&m, &e, opts.guard);
            let margin = positivity_margin(&m, branch, z)?;
            let c = count_pencil(&m, branch, z, opts.eig_rel_tol)?;
            Ok((e.kind == RootKind::Root, margin, c.count, c.flagged))
        };
        match step() {
            Ok((root, margin, count, flagged)) => {
                if branch == Branch::Minus {
                    p.root_minus = root;
                }
                p.positive &= margin >= 0.0;
                p.unflagged &= flagged == 0;
                total += count;
            }
            Err(e) => {
                p.failure = Some(format!("alpha={alpha}: {e}"));
                p.positive = false;
                p.at_most_two = false;
                p.unflagged = false;
            }
        }
    }
    p.at_most_two &= total <= 2;
    p
}

/// Smallest scanned value from which `holds` is true through the end of the
/// scan.
fn onset(points: &[Point], holds: impl Fn(&Point) -> bool) -> Option<f64> {
    match points.iter().rposition(|p| !holds(p)) {
        None => points.first().map(|p| p.alpha),
        Some(i) => points.get(i + 1).map(|p| p.alpha),
    }
}

pub fn scan_alphas() -> Vec<f64> {
    let decades = (SCAN_CAP / SCAN_START).log10().round() as usize;
    (0..=decades * STEPS_PER_DECADE)
        .map(|k| SCAN_START * 10f64.powf(k as f64 / STEPS_PER_DECADE as f64))
        .collect()
}

pub fn threshold(cfg: &RunConfig) -> Result<ThresholdReport, CliError> {
    let base = cfg.discrete_model()?;
    if base.is_decoupled() {
        return Err(CliError::Refused(
            "threshold scan needs a coupling that is not identically zero".into(),
        ));
    }
    let opts = cfg.count_options();
    let points: Vec<Point> = scan_alphas()
        .par_iter()
        .map(|&a| scan_point(&base, a, &opts))
        .collect();
    let predicted = ir_diagnostics_of(&base).small_alpha_threshold;
    Ok(ThresholdReport {
        scan_start: SCAN_START,
        scan_cap: SCAN_CAP,
        scan_factor: 10f64.powf(1.0 / STEPS_PER_DECADE as f64),
        root_minus: onset(&points, |p| p.root_minus),
        root_minus_predicted: predicted.is_finite().then_some(predicted),
        positivity: onset(&points, |p| p.positive),
        count_at_most_two: onset(&points, |p| p.at_most_two),
        unflagged: onset(&points, |p| p.unflagged),
        failures: points.iter().filter_map(|p| p.failure.clone()).collect(),
    })
}

impl ThresholdReport {
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let show = |v: Option<f64>| v.map_or_else(|| "not-found".to_string(), |x| x.to_string());
        vec![
            ("scan_start", self.scan_start.to_string()),
            ("scan_cap", self.scan_cap.to_string()),
            ("scan_factor", self.scan_factor.to_string()),
            ("root_minus", show(self.root_minus)),
            ("root_minus_predicted", show(self.root_minus_predicted)),
            ("positivity", show(self.positivity)),
            ("count_at_most_two", show(self.count_at_most_two)),
            ("unflagged", show(self.unflagged)),
            ("failures", self.failures.len().to_string()),
        ]
    }
}
