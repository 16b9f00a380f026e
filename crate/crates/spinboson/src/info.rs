use serde::{Deserialize, Serialize};
use spinboson_core::ir_diagnostics_of;

use crate::config::RunConfig;
use crate::error::CliError;

/// Grid summary and the norms the model hypotheses are stated in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub dimension: usize,
    pub eps: f64,
    pub n: usize,
    pub r_max: f64,
    pub rule: String,
    /// Panel boundaries of the composite rule.
    pub panels: Vec<f64>,
    pub coupling: String,
    pub lambda_norm: f64,
    pub ir_norm: f64,
    pub infrared_singular: bool,
    /// `√(2ε)/‖λ/√ω‖`; `None` when the model is decoupled.
    pub small_alpha_threshold: Option<f64>,
}

pub fn info(cfg: &RunConfig) -> Result<InfoReport, CliError> {
    let m = cfg.discrete_model()?;
    let ir = ir_diagnostics_of(&m);
    let q = m.quadrature();
    Ok(InfoReport {
        dimension: q.dimension(),
        eps: m.eps(),
        n: q.len(),
        r_max: q.r_max(),
        rule: q.rule().id().into(),
        panels: q.panels().to_vec(),
        coupling: cfg.model.coupling.family.clone(),
        lambda_norm: m.lambda_norm(),
        ir_norm: ir.ir_norm,
        infrared_singular: ir.infrared_singular,
        small_alpha_threshold: ir
            .small_alpha_threshold
            .is_finite()
            .then_some(ir.small_alpha_threshold),
    })
}

impl InfoReport {
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let panels: Vec<String> = self.panels.iter().map(f64::to_string).collect();
        vec![
            ("dimension", self.dimension.to_string()),
            ("eps", self.eps.to_string()),
            ("n", self.n.to_string()),
            ("r_max", self.r_max.to_string()),
            ("rule", self.rule.clone()),
            ("panels", panels.join(" ")),
            ("coupling", self.coupling.clone()),
            ("lambda_norm", self.lambda_norm.to_string()),
            ("ir_norm", self.ir_norm.to_string()),
            ("infrared_singular", self.infrared_singular.to_string()),
            (
                "small_alpha_threshold",
                self.small_alpha_threshold
                    .map_or_else(|| "inf".into(), |v| v.to_string()),
            ),
        ]
    }
}
