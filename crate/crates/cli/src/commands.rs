use std::fmt;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use sparse_ldp::experiments::{
    persist_report, rerun, run_rate_curve, ExperimentRegistry, ExperimentReport, RateCurveConfig,
};
use sparse_ldp::Error;

use crate::{Cli, Command, Common, ModelArg, ModelFlags, SizeFlags, VectorArg};

/// A command-line mistake, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for bad input (flags, configs, guards), 1 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(
            Error::InvalidParameter(_)
            | Error::Domain { .. }
            | Error::Guard(_)
            | Error::UnknownName { .. }
            | Error::UnsupportedLaw { .. }
            | Error::Parse(_)
            | Error::Serde(_),
        ) => 2,
        _ => 1,
    }
}

pub fn dispatch(cli: &Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match &cli.command {
        Command::Rate {
            law,
            law_params,
            diag_law,
            alpha,
            beta,
            from,
            to,
            points,
        } => {
            let mut cfg = base_config(common, "rate_curve")?;
            cfg.insert("law".into(), law_value(law, law_params)?);
            set(&mut cfg, "diag_law", diag_law.as_ref().map(|d| json!({ "name": d })));
            set(&mut cfg, "alpha", *alpha);
            set(&mut cfg, "beta", *beta);
            set(&mut cfg, "from", *from);
            set(&mut cfg, "to", *to);
            set(&mut cfg, "points", *points);
            cfg.remove("seed");
            let cfg: RateCurveConfig = serde_json::from_value(Value::Object(cfg))
                .map_err(|e| usage(format!("rate config: {e}")))?;
            let (curve, report) = run_rate_curve(&cfg)?;
            let csv = curve.to_csv();
            match &common.out {
                Some(path) => fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
                None if !common.json => print!("{csv}"),
                None => {}
            }
            if common.json {
                println!("{}", report.to_json()?);
            } else {
                match curve.t_star {
                    Some(t) => eprintln!("t_star {t:.10}"),
                    None => eprintln!("no phase transition"),
                }
                if let Some(path) = &common.out {
                    eprintln!("wrote {} rows to {}", curve.lambda_grid.len(), path.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plant {
            clique,
            vertex,
            k,
            t,
            r,
            s,
            size,
            model,
        } => {
            let name = if *clique { "clique_plant" } else { "vertex_plant" };
            let mut cfg = base_config(common, name)?;
            apply_size(&mut cfg, size);
            apply_model(&mut cfg, model)?;
            if *vertex {
                if k.is_some() {
                    return Err(usage("--k applies to --clique only"));
                }
                if r.is_some() || s.is_some() {
                    cfg.insert("r".into(), json!(r));
                    cfg.insert("s".into(), json!(s));
                    if t.is_none() && r.is_some() && s.is_some() {
                        cfg.insert("t".into(), Value::Null);
                    }
                }
                set(&mut cfg, "t", *t);
            } else {
                if r.is_some() || s.is_some() {
                    return Err(usage("--r and --s apply to --vertex only"));
                }
                set(&mut cfg, "k", *k);
                set(&mut cfg, "t", *t);
            }
            finish(common, name, cfg)
        }
        Command::Loclaw {
            lambda,
            vectors,
            vector_kind,
            size,
            model,
        } => {
            let mut cfg = base_config(common, "local_law")?;
            apply_size(&mut cfg, size);
            apply_model(&mut cfg, model)?;
            set(&mut cfg, "lambda", *lambda);
            set(&mut cfg, "num_vectors", *vectors);
            set(
                &mut cfg,
                "vectors",
                vector_kind.map(|v| match v {
                    VectorArg::Sphere => "sphere",
                    VectorArg::Delocalized => "delocalized",
                }),
            );
            finish(common, "local_law", cfg)
        }
        Command::Tail {
            law,
            law_params,
            n,
            p,
            theta,
            t_levels,
            mc_np,
            trials,
            draws,
        } => {
            let mut cfg = base_config(common, "degree_tail")?;
            if let Some(law) = law {
                cfg.insert("law".into(), law_value(law, law_params)?);
            } else if !law_params.is_empty() {
                return Err(usage("--law-param needs --law"));
            }
            set(&mut cfg, "n", *n);
            set(&mut cfg, "p", *p);
            set(&mut cfg, "theta_grid", theta.clone());
            set(&mut cfg, "t_grid", t_levels.clone());
            set(&mut cfg, "mc_np", *mc_np);
            set(&mut cfg, "trials", *trials);
            set(&mut cfg, "draws_per_trial", *draws);
            finish(common, "degree_tail", cfg)
        }
        Command::Typicality { size, model } => {
            let mut cfg = base_config(common, "typicality")?;
            apply_size(&mut cfg, size);
            apply_model(&mut cfg, model)?;
            finish(common, "typicality", cfg)
        }
        Command::Sweep => sweep(common),
        Command::Rerun { report } => rerun_report(common, report),
        Command::List => {
            let reg = ExperimentRegistry::default();
            if common.json {
                let all: Map<String, Value> = reg
                    .names()
                    .map(|n| (n.to_string(), reg.get(n).map(|e| e.default_config()).unwrap_or(Value::Null)))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&all)?);
            } else {
                for name in reg.names() {
                    let e = reg.get(name)?;
                    println!("{name:14} {}", e.about());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn set<T: serde::Serialize>(cfg: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        cfg.insert(key.to_string(), json!(v));
    }
}

/// The experiment's default config, overlaid with `--config` and `--seed`.
fn base_config(common: &Common, experiment: &str) -> Result<Map<String, Value>> {
    let reg = ExperimentRegistry::default();
    let Value::Object(mut cfg) = reg.get(experiment)?.default_config() else {
        unreachable!("default configs are objects")
    };
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let file: Value =
            serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        let Value::Object(fields) = file else {
            return Err(usage(format!("config {} must be a JSON object", path.display())));
        };
        cfg.extend(fields);
    }
    set(&mut cfg, "seed", common.seed);
    Ok(cfg)
}

fn apply_size(cfg: &mut Map<String, Value>, size: &SizeFlags) {
    set(cfg, "n", size.n);
    set(cfg, "p", size.p);
    set(cfg, "trials", size.trials);
}

fn parse_params(params: &[String]) -> Result<Map<String, Value>> {
    let mut out = Map::new();
    for item in params {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("law parameter `{item}` is not KEY=VALUE")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("law parameter `{k}` has non-numeric value `{v}`")))?;
        out.insert(k.trim().to_string(), json!(value));
    }
    Ok(out)
}

fn law_value(name: &str, params: &[String]) -> Result<Value> {
    let params = parse_params(params)?;
    Ok(if params.is_empty() {
        json!({ "name": name })
    } else {
        json!({ "name": name, "params": params })
    })
}

fn apply_model(cfg: &mut Map<String, Value>, flags: &ModelFlags) -> Result<()> {
    set(cfg, "solver", flags.solver.clone());
    let law_given = flags.law.is_some() || flags.diag_law.is_some() || !flags.law_params.is_empty();
    match flags.model {
        Some(ModelArg::Adjacency) => {
            if law_given {
                return Err(usage("the adjacency model takes no --law, --law-param or --diag-law"));
            }
            cfg.insert("model".into(), json!({ "kind": "adjacency_centered" }));
        }
        Some(ModelArg::Wigner) | None => {
            if flags.model.is_none() && !law_given {
                return Ok(());
            }
            let off = law_value(flags.law.as_deref().unwrap_or("gaussian"), &flags.law_params)?;
            let diag = match &flags.diag_law {
                Some(d) => json!({ "name": d }),
                None => off.clone(),
            };
            cfg.insert("model".into(), json!({ "kind": "wigner", "offdiag": off, "diag": diag }));
        }
    }
    Ok(())
}

fn finish(common: &Common, name: &str, cfg: Map<String, Value>) -> Result<ExitCode> {
    let report = ExperimentRegistry::default().run(name, &Value::Object(cfg))?;
    emit(common, &report, common.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn emit(common: &Common, report: &ExperimentReport, out: Option<&Path>) -> Result<()> {
    if let Some(path) = out {
        persist_report(report, path)?;
    }
    for f in &report.flags {
        eprintln!("flag: {f}");
    }
    if common.json {
        println!("{}", report.to_json()?);
    } else {
        println!("{}", summary(report));
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

/// One human-readable line (or a short table) per report.
pub fn summary(report: &ExperimentReport) -> String {
    let c = &report.config;
    match report.name.as_str() {
        "typicality" => format!(
            "mean lambda1 {} (predicted {}), mean norm {}, trials {}",
            fmt_opt(report.mean("lambda1")),
            fmt_opt(report.prediction("lambda1")),
            fmt_opt(report.mean("norm")),
            report.trials.len()
        ),
        "clique_plant" => format!(
            "predicted {:.3} measured {:.3} (k = {}, weight {:.6}, single outlier in {:.0}% of {} trials)",
            report.prediction("lambda1").unwrap_or(f64::NAN),
            report.mean("lambda1").unwrap_or(f64::NAN),
            c["k"],
            report.summary_value("weight").unwrap_or(f64::NAN),
            100.0 * report.summary_value("single_outlier_fraction").unwrap_or(f64::NAN),
            report.trials.len()
        ),
        "vertex_plant" => format!(
            "predicted {:.3} measured {:.3} (r = {:.6}, s = {:.6}, t = {:.6}, mass above 0.3 {})",
            report.prediction("lambda1").unwrap_or(f64::NAN),
            report.mean("lambda1").unwrap_or(f64::NAN),
            c["r"].as_f64().unwrap_or(f64::NAN),
            c["s"].as_f64().unwrap_or(f64::NAN),
            c["t"].as_f64().unwrap_or(f64::NAN),
            fmt_opt(report.mean("mass_above_0.3"))
        ),
        "local_law" => format!(
            "mean error {} (rms {}) against m(lambda) = {}, excluded {} of {} trials",
            fmt_opt(report.summary_value("mean_error")),
            fmt_opt(report.summary_value("rms_error")),
            fmt_opt(report.prediction("quadratic_form")),
            report.summary_value("excluded_trials").unwrap_or(f64::NAN),
            report.trials.len()
        ),
        "degree_tail" => {
            let mut out = String::from("theta      cgf        limit      gap\n");
            for theta in c["theta_grid"].as_array().into_iter().flatten().filter_map(Value::as_f64) {
                let v = report.summary_value(&format!("cgf_{theta}")).unwrap_or(f64::NAN);
                let l = report.summary_value(&format!("cgf_limit_{theta}")).unwrap_or(f64::NAN);
                out.push_str(&format!("{theta:<10} {v:<10.6} {l:<10.6} {:.6}\n", (v - l).abs()));
            }
            out.push_str("t          frequency  log_rate   -h_L(t)");
            for t in c["t_grid"].as_array().into_iter().flatten().filter_map(Value::as_f64) {
                out.push_str(&format!(
                    "\n{t:<10} {:<10.3e} {:<10.4} {:.4}",
                    report.summary_value(&format!("frequency_{t}")).unwrap_or(f64::NAN),
                    report.summary_value(&format!("log_rate_{t}")).unwrap_or(f64::NAN),
                    report.prediction(&format!("neg_h_l_{t}")).unwrap_or(f64::NAN)
                ));
            }
            out
        }
        "rate_curve" => format!(
            "{} grid points, {} regime flips, t_star {}",
            report.trials.len(),
            report.summary_value("regime_flips").unwrap_or(f64::NAN),
            fmt_opt(report.summary_value("t_star"))
        ),
        other => format!("{other}: {} trials", report.trials.len()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRun {
    experiment: String,
    #[serde(default)]
    config: Map<String, Value>,
    out: Option<std::path::PathBuf>,
}

fn sweep(common: &Common) -> Result<ExitCode> {
    let path = common.config.as_ref().ok_or_else(|| usage("sweep needs --config <runs.json>"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let runs: Vec<SweepRun> =
        serde_json::from_str(&text).map_err(|e| usage(format!("run list {}: {e}", path.display())))?;
    let reg = ExperimentRegistry::default();
    let mut failed = 0;
    for (i, run) in runs.iter().enumerate() {
        let mut cfg = run.config.clone();
        if !cfg.contains_key("seed") && run.experiment != "rate_curve" {
            set(&mut cfg, "seed", common.seed);
        }
        let outcome = reg
            .run(&run.experiment, &Value::Object(cfg))
            .map_err(anyhow::Error::from)
            .and_then(|report| emit(common, &report, run.out.as_deref()));
        if let Err(e) = outcome {
            failed += 1;
            eprintln!("run {i} ({}) failed: {e:#}", run.experiment);
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", runs.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn rerun_report(common: &Common, path: &Path) -> Result<ExitCode> {
    let stored = sparse_ldp::experiments::load_report(path)?;
    let again = rerun(&stored)?;
    let same = stored.trials == again.trials;
    if let Some(out) = &common.out {
        persist_report(&again, out)?;
    }
    if common.json {
        println!("{}", again.to_json()?);
    } else {
        println!(
            "{} trials re-run: {}",
            again.trials.len(),
            if same { "identical" } else { "DIFFERENT" }
        );
    }
    Ok(if same { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
