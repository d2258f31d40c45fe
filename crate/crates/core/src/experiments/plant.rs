//! Clique and heavy-vertex plants.

use serde::{Deserialize, Serialize};

use super::{
    config_value, error_scale, gaussian_model, key, model_beta, probe_top, run_trials, ExperimentReport, TrialRecord,
};
use crate::error::{Error, Result};
use crate::matrix_lab::{
    localization_profile, make_solver, sample_model, Model, SymMatrix, WignerSample, DEFAULT_EPS_GRID,
};
use crate::rng::{derive_seed, DEFAULT_SEED};
use crate::semicircle::{clique_secular_root, m_of, vertex_secular_root};

/// Tolerance on `r + m(t) s = t`.
const VERTEX_IDENTITY_TOL: f64 = 1e-9;

/// Resampling attempts when the planted column is too sparse.
const MAX_RESAMPLES: u64 = 32;

/// A planted structure and the outlier it targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantSpec {
    /// Equal weights on the off-diagonal `k × k` block.
    Clique { k: usize, t: f64 },
    /// Diagonal weight `r` and squared degree `s` on one vertex, with
    /// `r + m(t) s = t`.
    Vertex { r: f64, s: f64, t: f64 },
    /// Squared degree `d` on one vertex with no diagonal weight.
    Degree { d: f64 },
}

fn check_target(t: f64) -> Result<f64> {
    m_of(t).map_err(|_| Error::InvalidParameter(format!("target location must exceed 2, got {t}")))
}

impl PlantSpec {
    pub fn clique(k: usize, t: f64) -> Result<Self> {
        check_target(t)?;
        if k < 2 {
            return Err(Error::Guard(format!("clique size must be at least 2, got {k}")));
        }
        Ok(PlantSpec::Clique { k, t })
    }

    /// Solve `s = (t - r)/m(t)`.
    pub fn vertex_from_r(r: f64, t: f64) -> Result<Self> {
        let m = check_target(t)?;
        Self::vertex(r, (t - r) / m, t)
    }

    /// Solve `r = t - m(t) s`. An `s` rounded just above `t/m(t)` (so that
    /// `r` is negative by at most `1e-6 t`) is snapped to `r = 0`.
    pub fn vertex_from_s(s: f64, t: f64) -> Result<Self> {
        let m = check_target(t)?;
        let r = t - m * s;
        if r < 0.0 && r >= -1e-6 * t {
            return Self::vertex_from_r(0.0, t);
        }
        Self::vertex(r, s, t)
    }

    pub fn vertex(r: f64, s: f64, t: f64) -> Result<Self> {
        let m = check_target(t)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("vertex weight r must be >= 0, got {r}")));
        }
        if !(s >= 1.0) {
            return Err(Error::InvalidParameter(format!("vertex degree s must be >= 1, got {s}")));
        }
        let gap = r + m * s - t;
        if gap.abs() > VERTEX_IDENTITY_TOL * t {
            return Err(Error::InvalidParameter(format!(
                "r + m(t) s - t = {gap} for r = {r}, s = {s}, t = {t}"
            )));
        }
        Ok(PlantSpec::Vertex { r, s, t })
    }

    /// From any two of `(r, s, t)`; with all three, checks they agree.
    pub fn vertex_from(r: Option<f64>, s: Option<f64>, t: Option<f64>) -> Result<Self> {
        match (r, s, t) {
            (Some(r), None, Some(t)) => Self::vertex_from_r(r, t),
            (None, Some(s), Some(t)) => Self::vertex_from_s(s, t),
            (Some(r), Some(s), None) => {
                let t = vertex_secular_root(r, s)?.predicted_location;
                Self::vertex(r, s, t)
            }
            (Some(r), Some(s), Some(t)) => Self::vertex(r, s, t),
            _ => Err(Error::InvalidParameter("a vertex plant needs two of r, s, t".into())),
        }
    }

    pub fn degree(d: f64) -> Result<Self> {
        if !(d > 1.0) || !d.is_finite() {
            return Err(Error::InvalidParameter(format!("planted degree must exceed 1, got {d}")));
        }
        Ok(PlantSpec::Degree { d })
    }

    /// Predicted top eigenvalue; `2` when the plant is too weak to leave the bulk.
    pub fn predicted_location(&self) -> Result<f64> {
        match *self {
            PlantSpec::Clique { t, .. } | PlantSpec::Vertex { t, .. } => Ok(t),
            PlantSpec::Degree { d } => match vertex_secular_root(0.0, d) {
                Ok(b) => Ok(b.predicted_location),
                Err(Error::NoRoot(_)) => Ok(2.0),
                Err(e) => Err(e),
            },
        }
    }
}

/// Outcome of the clique size check.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardReport {
    /// `sqrt(np / log(1/p))`.
    pub bound: f64,
    pub warnings: Vec<String>,
}

/// Reject `k < 2` and `k > n/2`; warn when `k` passes half of
/// `sqrt(np / log(1/p))`, and again when it passes the bound itself.
pub fn clique_guard(n: usize, p: f64, k: usize) -> Result<GuardReport> {
    if k < 2 {
        return Err(Error::Guard(format!("clique size must be at least 2, got {k}")));
    }
    if 2 * k > n {
        return Err(Error::Guard(format!("clique size {k} exceeds n/2 = {}", n / 2)));
    }
    let np = n as f64 * p;
    let bound = (np / (1.0 / p).ln()).sqrt();
    let kf = k as f64;
    let mut warnings = Vec::new();
    if kf > bound {
        warnings.push(format!(
            "clique size {k} exceeds sqrt(np/log(1/p)) = {bound:.4}; planting costs more than the entropy it saves"
        ));
    } else if kf > bound / 2.0 {
        warnings.push(format!("clique size {k} is beyond half of sqrt(np/log(1/p)) = {bound:.4}"));
    }
    Ok(GuardReport { bound, warnings })
}

/// Off-diagonal entry written into the clique block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueWeight {
    /// `1/((k-1) m(t))`: the block's top eigenvalue is exactly `1/m(t)`.
    #[default]
    FiniteK,
    /// `1/(k m(t))`: the large-`k` form.
    Asymptotic,
}

impl CliqueWeight {
    pub fn weight(self, k: usize, t: f64) -> Result<f64> {
        let m = check_target(t)?;
        let denom = match self {
            CliqueWeight::FiniteK => (k - 1) as f64,
            CliqueWeight::Asymptotic => k as f64,
        };
        Ok(1.0 / (denom * m))
    }
}

/// Overwrite `X_ij` for `i != j < k` with `weight`; the diagonal is left alone.
pub fn plant_clique(a: &mut SymMatrix, k: usize, weight: f64) -> Result<()> {
    if k > a.n() {
        return Err(Error::Guard(format!("clique size {k} exceeds n = {}", a.n())));
    }
    for i in 0..k {
        for j in i + 1..k {
            a.set(i, j, weight);
        }
    }
    Ok(())
}

/// Set `X_00 = r` and rescale the stored off-diagonal entries of row and
/// column 0 so that `‖X̌_0‖² = s`. Entries that are not stored (the constant
/// part of a centered model) keep their value.
pub fn plant_vertex(a: &mut SymMatrix, r: f64, s: f64) -> Result<()> {
    let c = a.shift();
    let (mut stored, mut count) = (0.0, 0usize);
    for &(j, v) in a.sparse_row(0) {
        if j != 0 {
            stored += (v + c) * (v + c);
            count += 1;
        }
    }
    let fixed = (a.n() - 1 - count) as f64 * c * c;
    if !(stored > 0.0) || !(s > fixed) {
        return Err(Error::Guard(format!(
            "cannot rescale column 0 to squared degree {s}: {count} stored entries"
        )));
    }
    a.scale_offdiag(0, ((s - fixed) / stored).sqrt());
    a.set(0, 0, r);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliqueConfig {
    pub n: usize,
    pub p: f64,
    pub model: Model,
    pub k: usize,
    pub t: f64,
    pub weight: CliqueWeight,
    pub trials: usize,
    pub seed: u64,
    /// Off-diagonal tail parameter for the rate-cost record; taken from the
    /// model's law when absent.
    pub beta: Option<f64>,
    /// Multiplicity is counted above this level.
    pub count_threshold: f64,
    pub solver: String,
}

impl Default for CliqueConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            p: 0.05,
            model: gaussian_model(),
            k: 10,
            t: 3.0,
            weight: CliqueWeight::FiniteK,
            trials: 20,
            seed: DEFAULT_SEED,
            beta: None,
            count_threshold: 2.5,
            solver: "auto".into(),
        }
    }
}

/// Plant a clique in each sample and measure the top of the spectrum.
///
/// Per trial: `lambda1`, `lambda2`, `count_above` and `residual`. The summary
/// holds the block weight, the block's own top eigenvalue, the guard bound
/// and, when `β > 0`, the rate-cost proxy
/// `C(k,2) (log(1/p) + np/(2β k² m²)) / (np)` with its limit `1/(4β m²)`.
pub fn run_clique_plant(cfg: &CliqueConfig) -> Result<ExperimentReport> {
    let PlantSpec::Clique { k, t } = PlantSpec::clique(cfg.k, cfg.t)? else {
        unreachable!()
    };
    let guard = clique_guard(cfg.n, cfg.p, k)?;
    for w in &guard.warnings {
        log::warn!("{w}");
    }
    let weight = cfg.weight.weight(k, t)?;
    let solver = make_solver(&cfg.solver)?;
    let trials = run_trials(cfg.seed, cfg.trials, |index, seed| {
        let WignerSample { mut matrix, .. } = sample_model(cfg.n, cfg.p, &cfg.model, seed)?;
        plant_clique(&mut matrix, k, weight)?;
        let probe = probe_top(&matrix, solver.as_ref(), cfg.count_threshold)?;
        let mut rec = TrialRecord::new(index, seed);
        rec.set("lambda1", probe.top.values[0]);
        rec.set("lambda2", probe.top.values.get(1).copied().unwrap_or(f64::NAN));
        rec.set("count_above", probe.count_above as f64);
        rec.set("residual", probe.top.residuals[0]);
        Ok(rec)
    })?;

    let mut report = ExperimentReport::new("clique_plant", config_value(cfg)?, error_scale(cfg.n, cfg.p));
    report.trials = trials;
    report.aggregate();
    report.warnings = guard.warnings;
    let strength = (k - 1) as f64 * weight;
    match clique_secular_root(strength) {
        Ok(b) => report.predict("lambda1", b.predicted_location, "rank-one outlier at y + 1/y for block strength y"),
        Err(_) => report.predict("lambda1", 2.0, "block strength at most 1: no outlier, edge of the bulk"),
    }
    report.predict("target", t, "requested outlier location");
    report.set_summary("weight", weight);
    report.set_summary("plant_norm", strength);
    report.set_summary("guard_bound", guard.bound);
    let beta = match cfg.beta {
        Some(b) => Some(b),
        None => model_beta(&cfg.model)?,
    };
    if let Some(beta) = beta.filter(|&b| b > 0.0) {
        let np = cfg.n as f64 * cfg.p;
        let m = m_of(t)?;
        let kf = k as f64;
        let pairs = kf * (kf - 1.0) / 2.0;
        let proxy = pairs * ((1.0 / cfg.p).ln() + np / (2.0 * beta * kf * kf * m * m)) / np;
        report.set_summary("rate_cost_proxy", proxy);
        report.set_summary("rate_cost_limit", 1.0 / (4.0 * beta * m * m));
    }
    report.set_summary("single_outlier_fraction", single_outlier_fraction(&report));
    Ok(report)
}

fn single_outlier_fraction(report: &ExperimentReport) -> f64 {
    let counts = report.column("count_above");
    counts.iter().filter(|&&c| c == 1.0).count() as f64 / counts.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VertexConfig {
    pub n: usize,
    pub p: f64,
    pub model: Model,
    /// Any two of `r`, `s`, `t`; the report echoes all three.
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    pub count_threshold: f64,
    pub solver: String,
}

impl Default for VertexConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            p: 0.05,
            model: gaussian_model(),
            r: Some(0.0),
            s: None,
            t: Some(3.0),
            trials: 20,
            seed: DEFAULT_SEED,
            eps_grid: DEFAULT_EPS_GRID.to_vec(),
            count_threshold: 2.5,
            solver: "auto".into(),
        }
    }
}

/// Sample until column 0 has at least `ceil(np/2)` stored off-diagonal
/// entries. Returns the sample and the number of redraws.
fn sample_with_support(cfg: &VertexConfig, seed: u64) -> Result<(WignerSample, u64)> {
    let need = (cfg.n as f64 * cfg.p / 2.0).ceil() as usize;
    let mut draw_seed = seed;
    for attempt in 0..=MAX_RESAMPLES {
        let sample = sample_model(cfg.n, cfg.p, &cfg.model, draw_seed)?;
        let support = sample.matrix.sparse_row(0).iter().filter(|e| e.0 != 0).count();
        if support >= need {
            return Ok((sample, attempt));
        }
        draw_seed = derive_seed(seed, attempt + 1);
    }
    Err(Error::Experiment {
        name: "vertex_plant".into(),
        detail: format!("column 0 stayed below {need} entries after {MAX_RESAMPLES} redraws"),
    })
}

/// Plant a heavy vertex in each sample and measure the outlier and the
/// localization of its eigenvector.
///
/// Per trial: `lambda1`, `lambda2`, `count_above`, `planted_degree`
/// (recomputed `‖X̌_0‖²`), `planted_weight`, `max_full_degree` (`max ‖X_i‖²`),
/// `max_offdiag_degree`, `top_entry` (`|v_0|`), `mass_above_<eps>` and
/// `norm_above_<eps>` for the top eigenvector, `resamples`, `residual`.
pub fn run_vertex_plant(cfg: &VertexConfig) -> Result<ExperimentReport> {
    let PlantSpec::Vertex { r, s, t } = PlantSpec::vertex_from(cfg.r, cfg.s, cfg.t)? else {
        unreachable!()
    };
    let solver = make_solver(&cfg.solver)?;
    let trials = run_trials(cfg.seed, cfg.trials, |index, seed| {
        let (sample, resamples) = sample_with_support(cfg, seed)?;
        let mut matrix = sample.matrix;
        plant_vertex(&mut matrix, r, s)?;
        let probe = probe_top(&matrix, solver.as_ref(), cfg.count_threshold)?;
        let full = matrix.full_degrees();
        let off = matrix.offdiag_degrees();
        let v = &probe.top.vectors[0];
        let mut rec = TrialRecord::new(index, seed);
        rec.set("lambda1", probe.top.values[0]);
        rec.set("lambda2", probe.top.values.get(1).copied().unwrap_or(f64::NAN));
        rec.set("count_above", probe.count_above as f64);
        rec.set("planted_degree", off[0]);
        rec.set("planted_weight", matrix.get(0, 0));
        rec.set("max_full_degree", full.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        rec.set("max_offdiag_degree", off.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        rec.set("top_entry", v[0].abs());
        for point in localization_profile(v, &cfg.eps_grid)? {
            rec.set(&key("mass_above", point.eps), point.mass);
            rec.set(&key("norm_above", point.eps), point.norm);
        }
        rec.set("resamples", resamples as f64);
        rec.set("residual", probe.top.residuals[0]);
        Ok(rec)
    })?;

    let mut echoed = cfg.clone();
    echoed.r = Some(r);
    echoed.s = Some(s);
    echoed.t = Some(t);
    let mut report = ExperimentReport::new("vertex_plant", config_value(&echoed)?, error_scale(cfg.n, cfg.p));
    report.trials = trials;
    report.aggregate();
    let root = vertex_secular_root(r, s)?.predicted_location;
    report.predict("lambda1", root, "largest zero of 1 - s m(z)/(z - r)");
    report.predict("degree_threshold", t / m_of(t)?, "squared degree t/m(t) that places the outlier at t");
    report.predict("planted_full_degree", s + r * r, "s + r^2");
    report.set_summary("single_outlier_fraction", single_outlier_fraction(&report));
    Ok(report)
}
