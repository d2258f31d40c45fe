use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{config_value, error_scale, key, run_trials, ExperimentReport, TrialRecord};
use crate::entry_laws::{make_law, LawSpec};
use crate::error::{Error, Result};
use crate::legendre::build_transform;
use crate::rng::{CounterStreams, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegreeTailConfig {
    pub n: usize,
    pub p: f64,
    pub law: LawSpec,
    pub theta_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Mean degree `np` of the simulated columns; `n p` when absent.
    pub mc_np: Option<f64>,
    /// Batches of column draws; each batch is one trial.
    pub trials: usize,
    pub draws_per_trial: usize,
    pub seed: u64,
}

impl Default for DegreeTailConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            p: 0.01,
            law: LawSpec::named("rademacher"),
            theta_grid: vec![0.0, 0.5, 1.0],
            t_grid: vec![1.5],
            mc_np: Some(30.0),
            trials: 10,
            draws_per_trial: 10_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// `((n-1)/(np)) log(1 - p + p L(θ))`, the scaled cumulant generating
/// function of one column's squared norm.
pub fn degree_cgf(n: usize, p: f64, l_theta: f64) -> f64 {
    (n as f64 - 1.0) / (n as f64 * p) * (p * (l_theta - 1.0)).ln_1p()
}

/// Cumulant generating function of the degree against its limit, and the
/// simulated upper tail of the degree against `exp(-np h_L(t))`.
///
/// Summary keys per `θ`: `cgf_<θ>`, `cgf_limit_<θ>` (`L(θ) - 1`) and the
/// largest gap `cgf_max_gap`. Per `t`: `frequency_<t>`, `log_rate_<t>`
/// (`log(frequency)/np`, `-inf` when nothing exceeded) and `neg_h_l_<t>`.
/// Trials record `exceed_<t>` counts out of `draws`.
pub fn run_degree_tail(cfg: &DegreeTailConfig) -> Result<ExperimentReport> {
    let law = make_law(&cfg.law)?;
    if !(cfg.p > 0.0 && cfg.p <= 1.0) || cfg.n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and p in (0, 1], got n = {}, p = {}", cfg.n, cfg.p)));
    }
    if let Some(&t) = cfg.t_grid.iter().find(|&&t| !(t > 1.0 && t <= 5.0)) {
        return Err(Error::InvalidParameter(format!("tail levels must lie in (1, 5], got {t}")));
    }
    if cfg.draws_per_trial == 0 {
        return Err(Error::InvalidParameter("draws_per_trial must be at least 1".into()));
    }
    let mut cgf = Vec::with_capacity(cfg.theta_grid.len());
    for &theta in &cfg.theta_grid {
        let l = law.squared_mgf(theta);
        if !l.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} is outside the domain of L for law `{}`",
                cfg.law
            )));
        }
        cgf.push((theta, degree_cgf(cfg.n, cfg.p, l), l - 1.0));
    }

    let mc_np = cfg.mc_np.unwrap_or(cfg.n as f64 * cfg.p);
    let mc_p = mc_np / cfg.n as f64;
    if !(mc_p > 0.0 && mc_p <= 1.0) {
        return Err(Error::InvalidParameter(format!("mc_np = {mc_np} gives p outside (0, 1]")));
    }
    let binomial = Binomial::new((cfg.n - 1) as u64, mc_p)
        .map_err(|e| Error::InvalidParameter(format!("binomial(n - 1, {mc_p}): {e}")))?;
    let trials = run_trials(cfg.seed, cfg.trials, |index, seed| {
        let mut rng = CounterStreams::new(seed).stream(0);
        let mut exceed = vec![0u64; cfg.t_grid.len()];
        for _ in 0..cfg.draws_per_trial {
            let k = binomial.sample(&mut rng);
            let mut sum = 0.0;
            for _ in 0..k {
                let g = law.sample(&mut rng);
                sum += g * g;
            }
            let degree = sum / mc_np;
            for (c, &t) in exceed.iter_mut().zip(&cfg.t_grid) {
                if degree >= t {
                    *c += 1;
                }
            }
        }
        let mut rec = TrialRecord::new(index, seed);
        rec.set("draws", cfg.draws_per_trial as f64);
        for (&t, &c) in cfg.t_grid.iter().zip(&exceed) {
            rec.set(&key("exceed", t), c as f64);
        }
        Ok(rec)
    })?;

    let mut report = ExperimentReport::new("degree_tail", config_value(cfg)?, error_scale(cfg.n, cfg.p));
    report.trials = trials;
    report.aggregate();
    let mut max_gap: f64 = 0.0;
    for &(theta, value, limit) in &cgf {
        report.set_summary(&key("cgf", theta), value);
        report.set_summary(&key("cgf_limit", theta), limit);
        max_gap = max_gap.max((value - limit).abs());
    }
    report.set_summary("cgf_max_gap", max_gap);
    report.set_summary("mc_np", mc_np);
    let transform = build_transform(law.clone())?;
    let total = (cfg.trials * cfg.draws_per_trial) as f64;
    for &t in &cfg.t_grid {
        let hits: f64 = report.column(&key("exceed", t)).iter().sum();
        let frequency = hits / total;
        let h = transform.h_l(t)?;
        report.set_summary(&key("frequency", t), frequency);
        report.set_summary(&key("log_rate", t), frequency.ln() / mc_np);
        report.set_summary(&key("chernoff", t), (-mc_np * h).exp());
        report.predict(&key("neg_h_l", t), -h, "Chernoff exponent -h_L(t) of the degree upper tail");
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cgf_values() {
        let e = std::f64::consts::E;
        assert_eq!(degree_cgf(10_000, 0.01, 1.0), 0.0);
        assert!((degree_cgf(10_000, 0.01, e) - 1.7035159549852932).abs() < 1e-13);
        assert!((degree_cgf(10_000, 0.01, 0.5f64.exp()) - 0.6465614678504793).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_grids() {
        let mut cfg = DegreeTailConfig {
            t_grid: vec![0.5],
            ..Default::default()
        };
        assert!(run_degree_tail(&cfg).is_err());
        cfg.t_grid = vec![1.5];
        cfg.law = LawSpec::named("gaussian");
        cfg.theta_grid = vec![0.5];
        assert!(run_degree_tail(&cfg).is_err());
    }

    #[test]
    fn small_run_counts_draws() {
        let cfg = DegreeTailConfig {
            trials: 2,
            draws_per_trial: 500,
            ..Default::default()
        };
        let r = run_degree_tail(&cfg).unwrap();
        assert_eq!(r.column("draws"), vec![500.0, 500.0]);
        assert!(r.summary_value("cgf_max_gap").unwrap() < 0.02);
        let f = r.summary_value("frequency_1.5").unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}
