use serde::{Deserialize, Serialize};

use super::{config_value, error_scale, gaussian_model, run_trials, ExperimentReport, TrialRecord};
use crate::error::Result;
use crate::matrix_lab::{make_solver, sample_model, Model};
use crate::rng::DEFAULT_SEED;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TypicalityConfig {
    pub n: usize,
    pub p: f64,
    pub model: Model,
    pub trials: usize,
    pub seed: u64,
    /// Eigensolver registry name.
    pub solver: String,
}

impl Default for TypicalityConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            p: 0.05,
            model: gaussian_model(),
            trials: 20,
            seed: DEFAULT_SEED,
            solver: "auto".into(),
        }
    }
}

/// Per trial: `lambda1`, `lambda_min`, `norm = max(λ₁, -λ_min)` and the
/// residual of the top pair.
pub fn run_typicality(cfg: &TypicalityConfig) -> Result<ExperimentReport> {
    let solver = make_solver(&cfg.solver)?;
    let trials = run_trials(cfg.seed, cfg.trials, |index, seed| {
        let sample = sample_model(cfg.n, cfg.p, &cfg.model, seed)?;
        let top = solver.top(&sample.matrix, 1)?;
        let bottom = solver.top(&sample.matrix.negated(), 1)?;
        let mut rec = TrialRecord::new(index, seed);
        rec.set("lambda1", top.values[0]);
        rec.set("lambda_min", -bottom.values[0]);
        rec.set("norm", top.values[0].max(bottom.values[0]));
        rec.set("residual", top.residuals[0]);
        Ok(rec)
    })?;
    let mut report = ExperimentReport::new("typicality", config_value(cfg)?, error_scale(cfg.n, cfg.p));
    report.trials = trials;
    report.aggregate();
    report.predict("lambda1", 2.0, "right edge of the semicircle support");
    report.predict("norm", 2.0, "spectral radius of the semicircle law");
    if let Some(mean) = report.mean("lambda1") {
        report.set_summary("lambda1_gap", mean - 2.0);
    }
    Ok(report)
}
