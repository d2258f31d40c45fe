//! `sparse-ldp`: rate-function tables and Monte Carlo experiments.
//!
//! Exit codes: 0 success, 1 experiment failure, 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sparse-ldp", version, about = "Top-eigenvalue rate functions of sparse Wigner matrices")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Master seed; trial seeds are derived from it. Default 0x5EED2024
    /// unless the `--config` file sets one.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (JSON report, or CSV for `rate`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file with base config fields; flags override them. For `sweep`,
    /// the list of runs.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Wigner,
    Adjacency,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VectorArg {
    Sphere,
    Delocalized,
}

/// Matrix model and entry laws.
#[derive(Args, Debug, Clone)]
pub struct ModelFlags {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Off-diagonal law name (wigner model).
    #[arg(long)]
    pub law: Option<String>,
    /// Law parameter `key=value`, repeatable.
    #[arg(long = "law-param", value_name = "KEY=VALUE")]
    pub law_params: Vec<String>,
    /// Diagonal law name; defaults to the off-diagonal law.
    #[arg(long)]
    pub diag_law: Option<String>,
    /// Eigensolver: auto, dense or lanczos.
    #[arg(long)]
    pub solver: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SizeFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the rate function on a grid and write it as CSV.
    Rate {
        #[arg(long)]
        law: String,
        #[arg(long = "law-param", value_name = "KEY=VALUE")]
        law_params: Vec<String>,
        /// Diagonal law used for the default alpha.
        #[arg(long)]
        diag_law: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Plant a clique or a heavy vertex and compare the outlier with its prediction.
    #[command(group(ArgGroup::new("kind").required(true).args(["clique", "vertex"])))]
    Plant {
        #[arg(long)]
        clique: bool,
        #[arg(long)]
        vertex: bool,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[command(flatten)]
        size: SizeFlags,
        #[command(flatten)]
        model: ModelFlags,
    },
    /// Resolvent quadratic forms against the semicircle Stieltjes transform.
    Loclaw {
        #[arg(long)]
        lambda: Option<f64>,
        /// Test vectors per trial.
        #[arg(long)]
        vectors: Option<usize>,
        #[arg(long, value_enum)]
        vector_kind: Option<VectorArg>,
        #[command(flatten)]
        size: SizeFlags,
        #[command(flatten)]
        model: ModelFlags,
    },
    /// Degree cumulant generating function and simulated upper tail.
    Tail {
        #[arg(long)]
        law: Option<String>,
        #[arg(long = "law-param", value_name = "KEY=VALUE")]
        law_params: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated theta values.
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        /// Comma-separated tail levels in (1, 5].
        #[arg(long = "t", value_delimiter = ',')]
        t_levels: Option<Vec<f64>>,
        /// Mean degree of the simulated columns.
        #[arg(long)]
        mc_np: Option<f64>,
        /// Batches of column draws.
        #[arg(long)]
        trials: Option<usize>,
        /// Column draws per batch.
        #[arg(long)]
        draws: Option<usize>,
    },
    /// Top eigenvalue and norm of unplanted samples.
    Typicality {
        #[command(flatten)]
        size: SizeFlags,
        #[command(flatten)]
        model: ModelFlags,
    },
    /// Run a JSON list of `{"experiment", "config", "out"}` entries in order.
    Sweep,
    /// Re-run an experiment from a saved report and check the trials match.
    Rerun {
        report: PathBuf,
    },
    /// List experiments and their default configs.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
