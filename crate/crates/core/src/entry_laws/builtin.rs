use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{bernoulli_log_mgf, EntryLaw, LawKind, LawSpec};
use crate::error::{Error, Result};
use crate::numeric::{integrate, QuadOptions};

/// Standard Gaussian: `Λ(θ) = θ²/2`, `L(θ) = (1-2θ)^{-1/2}` on `θ < 1/2`, β = 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gaussian;

impl EntryLaw for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn kind(&self) -> LawKind {
        LawKind::Gaussian
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        StandardNormal.sample(rng)
    }

    fn log_mgf(&self, theta: f64) -> f64 {
        0.5 * theta * theta
    }

    fn squared_mgf(&self, theta: f64) -> f64 {
        if theta < 0.5 {
            (1.0 - 2.0 * theta).sqrt().recip()
        } else {
            f64::INFINITY
        }
    }

    fn tail_parameter(&self) -> f64 {
        1.0
    }

    fn density(&self, x: f64) -> Option<f64> {
        Some((-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
    }

    fn spec(&self) -> LawSpec {
        LawSpec::named("gaussian")
    }
}

/// Symmetric ±1 signs: `Λ(θ) = log cosh θ`, `L(θ) = e^θ`, β = 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rademacher;

impl EntryLaw for Rademacher {
    fn name(&self) -> &str {
        "rademacher"
    }

    fn kind(&self) -> LawKind {
        LawKind::Rademacher
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        if rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    fn log_mgf(&self, theta: f64) -> f64 {
        let a = theta.abs();
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    }

    fn squared_mgf(&self, theta: f64) -> f64 {
        theta.exp()
    }

    fn tail_parameter(&self) -> f64 {
        0.0
    }

    fn bound(&self) -> Option<f64> {
        Some(1.0)
    }

    fn spec(&self) -> LawSpec {
        LawSpec::named("rademacher")
    }
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Uniform law on `[-√3, √3]` (unit variance), β = 0. `L` has no elementary
/// closed form and is integrated numerically.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformBounded;

impl EntryLaw for UniformBounded {
    fn name(&self) -> &str {
        "uniform"
    }

    fn kind(&self) -> LawKind {
        LawKind::UniformBounded
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        rng.random_range(-SQRT3..SQRT3)
    }

    fn log_mgf(&self, theta: f64) -> f64 {
        // log(sinh(t)/t) with t = √3 θ.
        let t = (SQRT3 * theta).abs();
        if t < 1e-4 {
            let t2 = t * t;
            t2 / 6.0 - t2 * t2 / 180.0
        } else if t < 20.0 {
            (t.sinh() / t).ln()
        } else {
            t - std::f64::consts::LN_2 + (-2.0 * t).exp().ln_1p() - t.ln()
        }
    }

    fn squared_mgf(&self, theta: f64) -> f64 {
        if theta == 0.0 {
            return 1.0;
        }
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            ..QuadOptions::default()
        };
        let (v, _) = integrate(|x| (theta * x * x).exp(), 0.0, SQRT3, opts);
        v / SQRT3
    }

    fn tail_parameter(&self) -> f64 {
        0.0
    }

    fn bound(&self) -> Option<f64> {
        Some(SQRT3)
    }

    fn density(&self, x: f64) -> Option<f64> {
        Some(if x.abs() <= SQRT3 { 0.5 / SQRT3 } else { 0.0 })
    }

    fn spec(&self) -> LawSpec {
        LawSpec::named("uniform")
    }
}

/// Centered Bernoulli: `1-p` with probability `p`, `-p` otherwise, optionally
/// divided by `sqrt(p(1-p))` for unit variance.
#[derive(Debug, Clone, Copy)]
pub struct CenteredBernoulli {
    p: f64,
    scale: f64,
    normalized: bool,
}

impl CenteredBernoulli {
    pub fn new(p: f64, normalized: bool) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "centered_bernoulli needs p in (0, 1), got {p}"
            )));
        }
        let scale = if normalized { (p * (1.0 - p)).sqrt() } else { 1.0 };
        Ok(Self { p, scale, normalized })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl EntryLaw for CenteredBernoulli {
    fn name(&self) -> &str {
        "centered_bernoulli"
    }

    fn kind(&self) -> LawKind {
        LawKind::CenteredBernoulli {
            p: self.p,
            normalized: self.normalized,
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.random();
        if u < self.p {
            (1.0 - self.p) / self.scale
        } else {
            -self.p / self.scale
        }
    }

    fn log_mgf(&self, theta: f64) -> f64 {
        bernoulli_log_mgf(self.p, theta / self.scale)
    }

    fn squared_mgf(&self, theta: f64) -> f64 {
        let hi = (1.0 - self.p) / self.scale;
        let lo = self.p / self.scale;
        self.p * (theta * hi * hi).exp() + (1.0 - self.p) * (theta * lo * lo).exp()
    }

    fn tail_parameter(&self) -> f64 {
        0.0
    }

    fn bound(&self) -> Option<f64> {
        Some(self.p.max(1.0 - self.p) / self.scale)
    }

    fn variance(&self) -> f64 {
        if self.normalized {
            1.0
        } else {
            self.p * (1.0 - self.p)
        }
    }

    fn spec(&self) -> LawSpec {
        LawSpec::named("centered_bernoulli")
            .with("p", self.p)
            .with("normalized", if self.normalized { 1.0 } else { 0.0 })
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// A law assembled from caller-supplied evaluators. Both transforms must be
/// provided; nothing is differentiated or integrated automatically.
#[derive(Clone)]
pub struct CustomLaw {
    name: String,
    log_mgf: ScalarFn,
    squared_mgf: ScalarFn,
    sampler: SamplerFn,
    tail: f64,
    bound: Option<f64>,
    density: Option<ScalarFn>,
}

impl fmt::Debug for CustomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLaw")
            .field("name", &self.name)
            .field("tail", &self.tail)
            .field("bound", &self.bound)
            .field("has_density", &self.density.is_some())
            .finish()
    }
}

impl CustomLaw {
    pub fn new(
        name: impl Into<String>,
        tail_parameter: f64,
        log_mgf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        squared_mgf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sampler: impl Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(tail_parameter >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail parameter must be >= 0, got {tail_parameter}"
            )));
        }
        Ok(Self {
            name: name.into(),
            log_mgf: Arc::new(log_mgf),
            squared_mgf: Arc::new(squared_mgf),
            sampler: Arc::new(sampler),
            tail: tail_parameter,
            bound: None,
            density: None,
        })
    }

    pub fn with_density(mut self, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.density = Some(Arc::new(density));
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }
}

impl EntryLaw for CustomLaw {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> LawKind {
        LawKind::Custom
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (self.sampler)(rng)
    }

    fn log_mgf(&self, theta: f64) -> f64 {
        (self.log_mgf)(theta)
    }

    fn squared_mgf(&self, theta: f64) -> f64 {
        if theta >= self.theta_max() {
            return f64::INFINITY;
        }
        (self.squared_mgf)(theta)
    }

    fn tail_parameter(&self) -> f64 {
        self.tail
    }

    fn bound(&self) -> Option<f64> {
        self.bound
    }

    fn density(&self, x: f64) -> Option<f64> {
        self.density.as_ref().map(|f| f(x))
    }

    fn spec(&self) -> LawSpec {
        LawSpec::named(self.name.clone())
    }
}
