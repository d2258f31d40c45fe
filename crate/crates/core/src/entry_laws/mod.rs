//! Entry distributions of the matrix models.
//!
//! A law is anything implementing [`EntryLaw`]: a sampler plus the two
//! transforms the rate functions need, the log-MGF `Λ(θ) = log E e^{θG}` and
//! the squared-entry MGF `L(θ) = E e^{θG²}`. Built-in laws are registered by
//! name in a [`LawRegistry`] so configs and the CLI can select them at runtime.

mod bernoulli;
mod builtin;
mod truncation;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bernoulli::{bernoulli_log_mgf, bernoulli_rate};
pub use builtin::{CenteredBernoulli, CustomLaw, Gaussian, Rademacher, UniformBounded};
pub use truncation::{mean_preserving_truncation, TruncationWindow};

/// Family tag of a law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawKind {
    Gaussian,
    Rademacher,
    UniformBounded,
    CenteredBernoulli { p: f64, normalized: bool },
    Custom,
}

/// An entry distribution.
pub trait EntryLaw: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn kind(&self) -> LawKind;

    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    /// `Λ(θ) = log E exp(θ G)`.
    fn log_mgf(&self, theta: f64) -> f64;

    /// `L(θ) = E exp(θ G²)`; `+inf` outside the domain.
    fn squared_mgf(&self, theta: f64) -> f64;

    /// Sub-Gaussian tail parameter `lim 2Λ(θ)/θ²` (β for off-diagonal laws,
    /// α for diagonal laws).
    fn tail_parameter(&self) -> f64;

    /// Almost-sure bound on `|G|`, when there is one.
    fn bound(&self) -> Option<f64> {
        None
    }

    /// Density at `x`; `None` when the law is not absolutely continuous.
    fn density(&self, _x: f64) -> Option<f64> {
        None
    }

    fn variance(&self) -> f64 {
        1.0
    }

    /// Right end `1/(2β)` of the interior of the domain of `L`.
    fn theta_max(&self) -> f64 {
        let beta = self.tail_parameter();
        if beta == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (2.0 * beta)
        }
    }

    /// Serializable description that rebuilds this law through the registry.
    fn spec(&self) -> LawSpec;
}

/// Name and numeric parameters of a law, as stored in configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl LawSpec {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.params.get(key).copied().ok_or_else(|| {
            Error::InvalidParameter(format!("law `{}` needs parameter `{key}`", self.name))
        })
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { "(" } else { "," })?;
        }
        if !self.params.is_empty() {
            write!(f, ")")?;
        }
        Ok(())
    }
}

type LawCtor = Box<dyn Fn(&LawSpec) -> Result<Arc<dyn EntryLaw>> + Send + Sync>;

/// Name → constructor table for entry laws.
pub struct LawRegistry {
    ctors: BTreeMap<String, LawCtor>,
}

impl Default for LawRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl LawRegistry {
    pub fn empty() -> Self {
        Self {
            ctors: BTreeMap::new(),
        }
    }

    /// `gaussian`, `rademacher`, `uniform` and `centered_bernoulli` (parameter
    /// `p`, optional `normalized` flag defaulting to 1).
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("gaussian", |_| Ok(Arc::new(Gaussian)));
        reg.register("rademacher", |_| Ok(Arc::new(Rademacher)));
        reg.register("uniform", |spec| {
            if let Some(&r) = spec.params.get("R") {
                if !(r > 0.0) {
                    return Err(Error::InvalidParameter(format!("uniform needs R > 0, got {r}")));
                }
            }
            Ok(Arc::new(UniformBounded))
        });
        reg.register("centered_bernoulli", |spec| {
            let p = spec.param("p")?;
            let normalized = spec.params.get("normalized").copied().unwrap_or(1.0) != 0.0;
            Ok(Arc::new(CenteredBernoulli::new(p, normalized)?))
        });
        reg
    }

    pub fn register<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn(&LawSpec) -> Result<Arc<dyn EntryLaw>> + Send + Sync + 'static,
    {
        self.ctors.insert(name.to_string(), Box::new(ctor));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ctors.keys().map(String::as_str)
    }

    pub fn make(&self, spec: &LawSpec) -> Result<Arc<dyn EntryLaw>> {
        let ctor = self.ctors.get(&spec.name).ok_or_else(|| Error::UnknownName {
            kind: "law",
            name: spec.name.clone(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })?;
        ctor(spec)
    }
}

/// Build a built-in law from its spec.
pub fn make_law(spec: &LawSpec) -> Result<Arc<dyn EntryLaw>> {
    LawRegistry::with_builtins().make(spec)
}
