//! Named Monte Carlo experiments with JSON reports.
//!
//! Every experiment is a pure function of its config. Trial `i` runs on the
//! seed `derive_seed(config.seed, i)`; trials may run in parallel and are
//! collected in index order, so reports do not depend on the thread count.

mod degree_tail;
mod local_law;
mod plant;
mod rate_curve;
mod report;
mod typicality;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::entry_laws::{make_law, LawSpec};
use crate::error::{Error, Result};
use crate::matrix_lab::{count_eigs_above, EigenSolver, Model, SymMatrix, TopEigs};
use crate::rng::derive_seed;

pub use degree_tail::{degree_cgf, run_degree_tail, DegreeTailConfig};
pub use local_law::{delocalized_vector, resolvent_errors, run_local_law, sphere_vector, LocalLawConfig, TestVectors};
pub use plant::{
    clique_guard, plant_clique, plant_vertex, run_clique_plant, run_vertex_plant, CliqueConfig, CliqueWeight, GuardReport,
    PlantSpec, VertexConfig,
};
pub use rate_curve::{lambda_grid, run_rate_curve, RateCurveConfig};
pub use report::{
    error_scale, load_report, persist_report, Aggregate, ExperimentReport, Num, Prediction, TrialRecord,
    ERROR_SCALE_EXPONENT, SCHEMA_VERSION,
};
pub use typicality::{run_typicality, TypicalityConfig};

/// A named experiment taking a JSON config.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &str;

    fn about(&self) -> &str;

    /// The config used when every field is left out.
    fn default_config(&self) -> serde_json::Value;

    fn run(&self, config: &serde_json::Value) -> Result<ExperimentReport>;
}

struct Typed<C> {
    name: &'static str,
    about: &'static str,
    run: fn(&C) -> Result<ExperimentReport>,
}

impl<C> Experiment for Typed<C>
where
    C: Serialize + DeserializeOwned + Default,
{
    fn name(&self) -> &str {
        self.name
    }

    fn about(&self) -> &str {
        self.about
    }

    fn default_config(&self) -> serde_json::Value {
        serde_json::to_value(C::default()).unwrap_or(serde_json::Value::Null)
    }

    fn run(&self, config: &serde_json::Value) -> Result<ExperimentReport> {
        let cfg: C = serde_json::from_value(config.clone())
            .map_err(|e| Error::InvalidParameter(format!("config for `{}`: {e}", self.name)))?;
        (self.run)(&cfg)
    }
}

/// Name → experiment table.
pub struct ExperimentRegistry {
    entries: BTreeMap<String, Arc<dyn Experiment>>,
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        let mut reg = Self { entries: BTreeMap::new() };
        reg.register_typed("typicality", "top eigenvalue and norm of unplanted samples", run_typicality);
        reg.register_typed("clique_plant", "outlier created by a planted clique", run_clique_plant);
        reg.register_typed("vertex_plant", "outlier created by a heavy vertex", run_vertex_plant);
        reg.register_typed("local_law", "resolvent quadratic forms above the bulk", run_local_law);
        reg.register_typed("degree_tail", "degree cumulant generating function and upper tail", run_degree_tail);
        reg.register_typed("rate_curve", "tabulated rate function", |c| Ok(run_rate_curve(c)?.1));
        reg
    }
}

impl ExperimentRegistry {
    pub fn register(&mut self, experiment: Arc<dyn Experiment>) {
        self.entries.insert(experiment.name().to_string(), experiment);
    }

    fn register_typed<C>(&mut self, name: &'static str, about: &'static str, run: fn(&C) -> Result<ExperimentReport>)
    where
        C: Serialize + DeserializeOwned + Default + Send + Sync + 'static,
    {
        self.register(Arc::new(Typed { name, about, run }));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Experiment>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "experiment",
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })
    }

    pub fn run(&self, name: &str, config: &serde_json::Value) -> Result<ExperimentReport> {
        self.get(name)?.run(config)
    }
}

pub fn run_experiment(name: &str, config: &serde_json::Value) -> Result<ExperimentReport> {
    ExperimentRegistry::default().run(name, config)
}

/// Run an experiment again from the config stored in `report`.
pub fn rerun(report: &ExperimentReport) -> Result<ExperimentReport> {
    run_experiment(&report.name, &report.config)
}

pub(crate) fn config_value<C: Serialize>(cfg: &C) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(cfg)?)
}

/// Run `trial(index, seed)` for every index, in parallel, in index order.
pub(crate) fn run_trials<F>(master: u64, trials: usize, trial: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(u64, u64) -> Result<TrialRecord> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|i| trial(i, derive_seed(master, i)))
        .collect()
}

/// Tail parameter of the off-diagonal law, when the model has one.
pub(crate) fn model_beta(model: &Model) -> Result<Option<f64>> {
    match model {
        Model::Wigner { offdiag, .. } => Ok(Some(make_law(offdiag)?.tail_parameter())),
        Model::AdjacencyCentered => Ok(None),
    }
}

pub(crate) fn gaussian_model() -> Model {
    Model::wigner(LawSpec::named("gaussian"))
}

/// Eigenvalue probe shared by the plant experiments.
pub(crate) struct TopProbe {
    pub top: TopEigs,
    /// Eigenvalues at or above the threshold.
    pub count_above: usize,
}

/// Top four pairs, and the count above `threshold` (exact beyond four).
pub(crate) fn probe_top(a: &SymMatrix, solver: &dyn EigenSolver, threshold: f64) -> Result<TopProbe> {
    let k = 4.min(a.n());
    let top = solver.top(a, k)?;
    let mut count_above = top.values.iter().filter(|&&v| v >= threshold).count();
    if count_above == k && k < a.n() {
        count_above = count_eigs_above(a, threshold)?;
    }
    Ok(TopProbe { top, count_above })
}

/// Record key for a real parameter, e.g. `mass_above_0.3`.
pub(crate) fn key(prefix: &str, x: f64) -> String {
    format!("{prefix}_{x}")
}
