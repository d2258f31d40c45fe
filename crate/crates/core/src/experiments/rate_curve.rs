use serde::{Deserialize, Serialize};

use super::{config_value, ExperimentReport, TrialRecord};
use crate::entry_laws::{make_law, LawSpec};
use crate::error::{Error, Result};
use crate::legendre::build_transform;
use crate::rate_functions::{rate_curve, RateCurve, Regime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateCurveConfig {
    /// Off-diagonal law; it defines `h_L` and, unless overridden, `β`.
    pub law: LawSpec,
    /// Diagonal law for the default `α`; the off-diagonal law when absent.
    pub diag_law: Option<LawSpec>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Explicit grid; replaces `from`, `to`, `points`.
    pub grid: Option<Vec<f64>>,
}

impl Default for RateCurveConfig {
    fn default() -> Self {
        Self {
            law: LawSpec::named("gaussian"),
            diag_law: None,
            alpha: None,
            beta: None,
            from: 2.1,
            to: 6.0,
            points: 100,
            grid: None,
        }
    }
}

/// `points` equally spaced values from `from` to `to` inclusive.
pub fn lambda_grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from > 2.0 && to > from && to.is_finite()) || points < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs 2 < from < to and at least 2 points, got from = {from}, to = {to}, points = {points}"
        )));
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { to } else { from + step * i as f64 })
        .collect())
}

/// Tabulate the rate function. The report has one record per grid point
/// (`lambda`, `i_hat`, `clique`, `i`, `regime` with vertex = 0, clique = 1)
/// and summarizes `alpha`, `beta`, `regime_flips` and `t_star` when found.
pub fn run_rate_curve(cfg: &RateCurveConfig) -> Result<(RateCurve, ExperimentReport)> {
    let law = make_law(&cfg.law)?;
    let beta = cfg.beta.unwrap_or_else(|| law.tail_parameter());
    let alpha = match (cfg.alpha, &cfg.diag_law) {
        (Some(a), _) => a,
        (None, Some(d)) => make_law(d)?.tail_parameter(),
        (None, None) => law.tail_parameter(),
    };
    let grid = match &cfg.grid {
        Some(g) => g.clone(),
        None => lambda_grid(cfg.from, cfg.to, cfg.points)?,
    };
    let transform = build_transform(law)?;
    let curve = rate_curve(&transform, alpha, beta, &grid)?;

    let mut echoed = cfg.clone();
    echoed.alpha = Some(alpha);
    echoed.beta = Some(beta);
    let mut report = ExperimentReport::new("rate_curve", config_value(&echoed)?, f64::NAN);
    for (i, &lambda) in curve.lambda_grid.iter().enumerate() {
        let mut rec = TrialRecord::new(i as u64, 0);
        rec.set("lambda", lambda);
        rec.set("i_hat", curve.i_hat[i]);
        rec.set("clique", curve.clique_term[i]);
        rec.set("i", curve.i_value[i]);
        rec.set("regime", if curve.regime[i] == Regime::Clique { 1.0 } else { 0.0 });
        report.trials.push(rec);
    }
    report.set_summary("alpha", alpha);
    report.set_summary("beta", beta);
    report.set_summary("regime_flips", curve.regime_flips() as f64);
    if let Some(t) = curve.t_star {
        report.set_summary("t_star", t);
    }
    Ok((curve, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = lambda_grid(2.1, 6.0, 100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!((g[0], g[99]), (2.1, 6.0));
        assert!(lambda_grid(2.0, 6.0, 10).is_err());
        assert!(lambda_grid(3.0, 2.5, 10).is_err());
    }

    #[test]
    fn rademacher_is_vertex_everywhere() {
        let cfg = RateCurveConfig {
            law: LawSpec::named("rademacher"),
            points: 20,
            ..Default::default()
        };
        let (curve, report) = run_rate_curve(&cfg).unwrap();
        assert!(curve.regime.iter().all(|r| *r == Regime::Vertex));
        assert_eq!(report.summary_value("beta"), Some(0.0));
        assert!(report.summary_value("t_star").is_none());
    }
}
