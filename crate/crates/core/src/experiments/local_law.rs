use rand::seq::index;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{config_value, error_scale, gaussian_model, run_trials, ExperimentReport, TrialRecord};
use crate::error::{Error, Result};
use crate::matrix_lab::{make_solver, resolvent_quadratics_above, sample_model, Model, SymMatrix};
use crate::rng::{derive_seed, CounterStreams, DEFAULT_SEED};
use crate::semicircle::m_of;

/// Smallest spectral parameter accepted.
const MIN_LAMBDA: f64 = 2.4;

/// Excluded fraction above which the report is flagged.
const EXCLUSION_FLAG: f64 = 0.2;

/// Offset of the test-vector seed from the trial seed.
const VECTOR_STREAM: u64 = 0xFEC7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestVectors {
    /// Uniform on the unit sphere.
    Sphere,
    /// Random signs `±1/sqrt(K)` on a uniform random support of size
    /// `K = min(n, floor((np / log n)²))`, so `‖u‖₁ ≤ np / log n`.
    #[default]
    Delocalized,
}

pub fn sphere_vector(n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn delocalized_vector(n: usize, p: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    let n_f = n as f64;
    let budget = n_f * p / n_f.ln();
    let support = ((budget * budget).floor() as usize).clamp(1, n);
    let value = 1.0 / (support as f64).sqrt();
    let mut v = vec![0.0; n];
    for i in index::sample(rng, n, support) {
        v[i] = if rng.random::<bool>() { value } else { -value };
    }
    v
}

/// `⟨u, (λ - X)^{-1} u⟩ - m(λ)` for every `u`, given the top eigenvalue.
pub fn resolvent_errors(a: &SymMatrix, lambda: f64, vectors: &[Vec<f64>], top: f64) -> Result<Vec<f64>> {
    let m = m_of(lambda)?;
    Ok(resolvent_quadratics_above(a, lambda, vectors, top)?
        .into_iter()
        .map(|q| q - m)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalLawConfig {
    pub n: usize,
    pub p: f64,
    pub model: Model,
    pub lambda: f64,
    pub num_vectors: usize,
    pub vectors: TestVectors,
    pub trials: usize,
    pub seed: u64,
    /// Trials with `λ₁ >= lambda - exclusion_margin` are excluded.
    pub exclusion_margin: f64,
    pub solver: String,
}

impl Default for LocalLawConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            p: 0.1,
            model: gaussian_model(),
            lambda: 3.0,
            num_vectors: 50,
            vectors: TestVectors::Delocalized,
            trials: 10,
            seed: DEFAULT_SEED,
            exclusion_margin: 0.1,
            solver: "auto".into(),
        }
    }
}

/// Resolvent quadratic forms against `m(λ)`.
///
/// Per trial: `lambda1`, `excluded` (0 or 1) and, for kept trials,
/// `mean_error`, `rms_error`, `max_abs_error` over its test vectors, and the
/// raw `sum_error` and `sum_sq_error`.
/// Aggregates cover kept trials only. The summary pools every kept
/// (trial, vector) pair into `mean_error`, `abs_mean_error` and `rms_error`.
pub fn run_local_law(cfg: &LocalLawConfig) -> Result<ExperimentReport> {
    if !(cfg.lambda >= MIN_LAMBDA) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be at least {MIN_LAMBDA}, got {}",
            cfg.lambda
        )));
    }
    if cfg.num_vectors == 0 {
        return Err(Error::InvalidParameter("num_vectors must be at least 1".into()));
    }
    let solver = make_solver(&cfg.solver)?;
    let trials = run_trials(cfg.seed, cfg.trials, |index, seed| {
        let sample = sample_model(cfg.n, cfg.p, &cfg.model, seed)?;
        let top = solver.top(&sample.matrix, 1)?.values[0];
        let mut rec = TrialRecord::new(index, seed);
        rec.set("lambda1", top);
        if top >= cfg.lambda - cfg.exclusion_margin {
            rec.set("excluded", 1.0);
            return Ok(rec);
        }
        rec.set("excluded", 0.0);
        let streams = CounterStreams::new(derive_seed(seed, VECTOR_STREAM));
        let vectors: Vec<Vec<f64>> = (0..cfg.num_vectors as u64)
            .map(|v| {
                let mut rng = streams.stream(v);
                match cfg.vectors {
                    TestVectors::Sphere => sphere_vector(cfg.n, &mut rng),
                    TestVectors::Delocalized => delocalized_vector(cfg.n, cfg.p, &mut rng),
                }
            })
            .collect();
        let errors = resolvent_errors(&sample.matrix, cfg.lambda, &vectors, top)?;
        let k = errors.len() as f64;
        rec.set("mean_error", errors.iter().sum::<f64>() / k);
        rec.set("rms_error", (errors.iter().map(|e| e * e).sum::<f64>() / k).sqrt());
        rec.set("max_abs_error", errors.iter().fold(0.0, |a: f64, e| a.max(e.abs())));
        rec.set("sum_error", errors.iter().sum());
        rec.set("sum_sq_error", errors.iter().map(|e| e * e).sum());
        Ok(rec)
    })?;

    let excluded = trials.iter().filter(|t| t.get("excluded") == Some(1.0)).count();
    if excluded == trials.len() {
        return Err(Error::Experiment {
            name: "local_law".into(),
            detail: format!(
                "all {} trials had lambda1 >= {} and were excluded",
                trials.len(),
                cfg.lambda - cfg.exclusion_margin
            ),
        });
    }
    let kept: Vec<&TrialRecord> = trials.iter().filter(|t| t.get("excluded") == Some(0.0)).collect();
    let count = (kept.len() * cfg.num_vectors) as f64;
    let mean = kept.iter().filter_map(|t| t.get("sum_error")).sum::<f64>() / count;
    let mean_sq = kept.iter().filter_map(|t| t.get("sum_sq_error")).sum::<f64>() / count;

    let mut report = ExperimentReport::new("local_law", config_value(cfg)?, error_scale(cfg.n, cfg.p));
    report.trials = trials;
    report.aggregate_where(|t| t.get("excluded") == Some(0.0));
    report.predict("quadratic_form", m_of(cfg.lambda)?, "Stieltjes transform of the semicircle law");
    report.set_summary("mean_error", mean);
    report.set_summary("abs_mean_error", mean.abs());
    report.set_summary("rms_error", mean_sq.sqrt());
    report.set_summary("excluded_trials", excluded as f64);
    let fraction = excluded as f64 / cfg.trials as f64;
    report.set_summary("excluded_fraction", fraction);
    if fraction > EXCLUSION_FLAG {
        report.flags.push(format!(
            "{excluded} of {} trials excluded (more than {}%)",
            cfg.trials,
            EXCLUSION_FLAG * 100.0
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_matrix_error_is_exact() {
        let a = SymMatrix::zeros(50);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = vec![sphere_vector(50, &mut rng), delocalized_vector(50, 0.5, &mut rng)];
        let lambda = 3.0;
        for e in resolvent_errors(&a, lambda, &u, 0.0).unwrap() {
            assert!((e - (1.0 / lambda - m_of(lambda).unwrap())).abs() < 1e-14);
        }
    }

    #[test]
    fn delocalized_vectors_respect_the_l1_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (n, p) = (4096, 0.1);
        let u = delocalized_vector(n, p, &mut rng);
        let l1: f64 = u.iter().map(|x| x.abs()).sum();
        let l2: f64 = u.iter().map(|x| x * x).sum();
        assert!((l2 - 1.0).abs() < 1e-12);
        assert!(l1 <= n as f64 * p / (n as f64).ln());
        assert_eq!(u.iter().filter(|x| **x != 0.0).count(), 2424);
    }

    #[test]
    fn rejects_low_lambda_and_reports_exclusions() {
        let low = LocalLawConfig {
            lambda: 2.2,
            ..Default::default()
        };
        assert!(run_local_law(&low).is_err());
        let all_out = LocalLawConfig {
            n: 200,
            p: 0.2,
            lambda: 2.4,
            exclusion_margin: 1.0,
            trials: 2,
            num_vectors: 3,
            ..Default::default()
        };
        assert!(matches!(run_local_law(&all_out), Err(Error::Experiment { .. })));
    }
}
