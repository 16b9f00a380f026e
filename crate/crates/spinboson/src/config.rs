//! Run configuration: a JSON document with every field optional.
//!
//! ```json
//! {
//!   "model": {"eps": 1.0, "dimension": 1,
//!             "coupling": {"family": "sqrt-cutoff", "lambda_cutoff": 1.0},
//!             "dispersion": {"family": "abs-k"}},
//!   "grid": {"n": 32, "r_max": 4.0, "rule": "gauss-legendre"},
//!   "tolerances": {"root_tol": 1e-12, "eig_tol": 1e-9, "guard": 1e-8},
//!   "sweep": {"alpha_min": 1, "alpha_max": 1000, "steps": 7, "log_spacing": true},
//!   "output": {"format": "csv", "path": null}
//! }
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spinboson_core::{
    oracle::CountOptions, Complex64, Coupling, DiscreteModel, Dispersion, ModelSpec, Quadrature,
    RootOptions, Rule,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TableEntry {
    Real(f64),
    Complex([f64; 2]),
}

impl TableEntry {
    fn value(&self) -> Complex64 {
        match *self {
            TableEntry::Real(re) => Complex64::new(re, 0.0),
            TableEntry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    pub family: String,
    pub lambda_cutoff: f64,
    pub table: Option<Vec<TableEntry>>,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            family: "sqrt-cutoff".into(),
            lambda_cutoff: 1.0,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub family: String,
    pub table: Option<Vec<f64>>,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig {
            family: "abs-k".into(),
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub eps: f64,
    pub dimension: usize,
    pub coupling: CouplingConfig,
    pub dispersion: DispersionConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            eps: 1.0,
            dimension: 1,
            coupling: CouplingConfig::default(),
            dispersion: DispersionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub r_max: f64,
    pub rule: String,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 32,
            r_max: 4.0,
            rule: Rule::GaussLegendre.id().into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative bisection width for the threshold root.
    pub root_tol: f64,
    /// Relative zero band for eigenvalue counts.
    pub eig_tol: f64,
    /// Relative offset below `-ε` when the lower threshold is conventional.
    pub guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_tol: 1e-12,
            eig_tol: 1e-9,
            guard: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
    pub log_spacing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alpha_min: 1.0,
            alpha_max: 1000.0,
            steps: 7,
            log_spacing: true,
        }
    }
}

impl SweepConfig {
    pub fn alphas(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.alpha_min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == 0 {
                    return self.alpha_min;
                }
                if k == self.steps - 1 {
                    return self.alpha_max;
                }
                let t = k as f64 / last;
                if self.log_spacing {
                    let (a, b) = (self.alpha_min.log10(), self.alpha_max.log10());
                    10f64.powf(a + t * (b - a))
                } else {
                    self.alpha_min + t * (self.alpha_max - self.alpha_min)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

fn bad(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." || path == "?" {
            "<document>".to_string()
        } else {
            path
        };
        bad(&field, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("model.eps", self.model.eps)?;
        if self.model.dimension == 0 {
            return Err(bad("model.dimension", "must be at least 1"));
        }
        if self.grid.n == 0 {
            return Err(bad("grid.n", "must be at least 1"));
        }
        positive("grid.r_max", self.grid.r_max)?;
        if Rule::from_id(&self.grid.rule).is_none() {
            return Err(bad(
                "grid.rule",
                format!("unknown rule `{}`", self.grid.rule),
            ));
        }
        positive("tolerances.root_tol", self.tolerances.root_tol)?;
        positive("tolerances.eig_tol", self.tolerances.eig_tol)?;
        positive("tolerances.guard", self.tolerances.guard)?;

        let s = &self.sweep;
        if !(s.alpha_min >= 0.0 && s.alpha_min.is_finite()) {
            return Err(bad("sweep.alpha_min", "must be non-negative and finite"));
        }
        if !(s.alpha_max >= s.alpha_min && s.alpha_max.is_finite()) {
            return Err(bad(
                "sweep.alpha_max",
                "must be finite and at least alpha_min",
            ));
        }
        if s.steps == 0 {
            return Err(bad("sweep.steps", "must be at least 1"));
        }
        if s.log_spacing && s.alpha_min <= 0.0 {
            return Err(bad("sweep.alpha_min", "must be positive with log_spacing"));
        }

        let c = &self.model.coupling;
        match c.family.as_str() {
            "sqrt-cutoff" => {
                positive("model.coupling.lambda_cutoff", c.lambda_cutoff)?;
                if c.lambda_cutoff > self.grid.r_max {
                    return Err(bad(
                        "model.coupling.lambda_cutoff",
                        "cutoff exceeds grid.r_max",
                    ));
                }
            }
            "sqrt-gaussian" => positive("model.coupling.lambda_cutoff", c.lambda_cutoff)?,
            "table" => {
                let t = c
                    .table
                    .as_ref()
                    .ok_or_else(|| bad("model.coupling.table", "required for the table family"))?;
                if t.len() != self.grid.n {
                    return Err(bad(
                        "model.coupling.table",
                        format!("expected {} values, got {}", self.grid.n, t.len()),
                    ));
                }
                if t.iter().all(|v| v.value().norm_sqr() == 0.0) {
                    return Err(bad(
                        "model.coupling.table",
                        "identically zero; use family \"none\"",
                    ));
                }
            }
            "none" => {}
            other => {
                return Err(bad(
                    "model.coupling.family",
                    format!("unknown family `{other}`"),
                ))
            }
        }
        if c.family != "table" && c.table.is_some() {
            return Err(bad(
                "model.coupling.table",
                "only allowed with the table family",
            ));
        }

        let d = &self.model.dispersion;
        match d.family.as_str() {
            "abs-k" => {
                if d.table.is_some() {
                    return Err(bad(
                        "model.dispersion.table",
                        "only allowed with the table family",
                    ));
                }
            }
            "table" => {
                let t = d.table.as_ref().ok_or_else(|| {
                    bad("model.dispersion.table", "required for the table family")
                })?;
                if t.len() != self.grid.n {
                    return Err(bad(
                        "model.dispersion.table",
                        format!("expected {} values, got {}", self.grid.n, t.len()),
                    ));
                }
                if t.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
                    return Err(bad("model.dispersion.table", "values must be non-negative"));
                }
            }
            other => {
                return Err(bad(
                    "model.dispersion.family",
                    format!("unknown family `{other}`"),
                ))
            }
        }
        Ok(())
    }

    /// Model specification with `α = 0`; sweeps set the coupling per row.
    pub fn model_spec(&self) -> ModelSpec {
        let c = &self.model.coupling;
        let coupling = match c.family.as_str() {
            "sqrt-cutoff" => Coupling::SqrtCutoff {
                cutoff: c.lambda_cutoff,
            },
            "sqrt-gaussian" => Coupling::SqrtGaussian {
                width: c.lambda_cutoff,
            },
            "table" => Coupling::Table(c.table.iter().flatten().map(TableEntry::value).collect()),
            _ => Coupling::None,
        };
        let dispersion = match &self.model.dispersion.table {
            Some(t) => Dispersion::Table(t.clone()),
            None => Dispersion::AbsK,
        };
        ModelSpec {
            eps: self.model.eps,
            alpha: 0.0,
            dimension: self.model.dimension,
            dispersion,
            coupling,
        }
    }

    pub fn rule(&self) -> Rule {
        Rule::from_id(&self.grid.rule).unwrap_or_default()
    }

    /// Tabulated families are aligned with a single-panel grid.
    pub fn uses_tables(&self) -> bool {
        self.model.coupling.family == "table" || self.model.dispersion.family == "table"
    }

    pub fn quadrature(&self) -> Result<Quadrature, CliError> {
        let spec = self.model_spec();
        let q = if self.uses_tables() {
            spinboson_core::build_radial_grid(
                spec.dimension,
                self.grid.n,
                self.grid.r_max,
                self.rule(),
            )?
        } else {
            spec.grid(self.grid.n, self.grid.r_max, self.rule())?
        };
        Ok(q)
    }

    pub fn discrete_model(&self) -> Result<DiscreteModel, CliError> {
        Ok(DiscreteModel::new(&self.model_spec(), &self.quadrature()?)?)
    }

    pub fn root_options(&self) -> RootOptions {
        RootOptions {
            z_rel_tol: self.tolerances.root_tol,
            ..RootOptions::default()
        }
    }

    pub fn count_options(&self) -> CountOptions {
        CountOptions {
            eig_rel_tol: self.tolerances.eig_tol,
            guard: self.tolerances.guard,
            root: self.root_options(),
            // Block solves belong to `verify`; sweeps count on the pencil.
            direct_cap: 0,
        }
    }
}
