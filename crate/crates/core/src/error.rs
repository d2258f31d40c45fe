use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain where the quantity is defined.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Construction parameters were rejected.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A secular equation had no zero inside the search bracket.
    #[error("no root: {0}")]
    NoRoot(String),

    /// The law does not provide what the operation needs (e.g. a density).
    #[error("unsupported law `{law}`: {detail}")]
    UnsupportedLaw { law: String, detail: String },

    /// Unknown name passed to a registry.
    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    /// Iterative solver ran out of budget.
    #[error("{solver} did not converge: {detail}")]
    NonConvergence { solver: &'static str, detail: String },

    /// Shifted solve requested at a point inside the spectrum.
    #[error("spectrum overlap: lambda = {lambda} is not above the top eigenvalue {top}")]
    SpectrumOverlap { lambda: f64, top: f64 },

    /// Plant guard violation.
    #[error("plant guard: {0}")]
    Guard(String),

    /// Experiment could not produce any usable trial.
    #[error("experiment `{name}` failed: {detail}")]
    Experiment { name: String, detail: String },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
