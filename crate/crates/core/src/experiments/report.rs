use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Local-law exponent in the error scale.
pub const ERROR_SCALE_EXPONENT: f64 = 0.4;

/// A report scalar. Finite values serialize as JSON numbers; `inf`, `-inf`
/// and `nan` as strings, since JSON has no literal for them. Equality is
/// bitwise so a report that holds a NaN still equals its reloaded copy.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits() || (self.0.is_nan() && other.0.is_nan())
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
        Ok(Num(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
        match v {
            "inf" => Ok(Num(f64::INFINITY)),
            "-inf" => Ok(Num(f64::NEG_INFINITY)),
            "nan" => Ok(Num(f64::NAN)),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

/// Scalars measured in one trial, with the seed that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub values: BTreeMap<String, Num>,
}

impl TrialRecord {
    pub fn new(index: u64, seed: u64) -> Self {
        Self {
            index,
            seed,
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), Num(value));
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).map(|v| v.0)
    }
}

/// Summary statistics of one measured field over the trials that have it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub mean: Num,
    /// Sample standard deviation; absent with fewer than two values.
    pub stddev: Option<Num>,
    pub min: Num,
    pub max: Num,
    /// Keys `q10`, `q50`, `q90` (linear interpolation between order statistics).
    pub quantiles: BTreeMap<String, Num>,
}

/// Pairwise summation, so the result depends only on the order of `xs`.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Aggregate {
    /// `None` for an empty slice.
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = pairwise_sum(xs) / n;
        let stddev = (xs.len() > 1).then(|| {
            let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
            Num((pairwise_sum(&dev) / (n - 1.0)).sqrt())
        });
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let quantiles = [("q10", 0.1), ("q50", 0.5), ("q90", 0.9)]
            .iter()
            .map(|&(k, q)| (k.to_string(), Num(quantile(&sorted, q))))
            .collect();
        Some(Self {
            count: xs.len(),
            mean: Num(mean),
            stddev,
            min: Num(sorted[0]),
            max: Num(sorted[sorted.len() - 1]),
            quantiles,
        })
    }
}

/// A reference value and where it comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub name: String,
    pub value: Num,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    /// The resolved config, defaults filled in. Running the experiment again
    /// on it reproduces `trials` bit for bit.
    pub config: serde_json::Value,
    pub trials: Vec<TrialRecord>,
    pub aggregates: BTreeMap<String, Aggregate>,
    /// Experiment-level measurements that are not per trial.
    pub summary: BTreeMap<String, Num>,
    pub predicted: Vec<Prediction>,
    pub error_scale: Num,
    pub warnings: Vec<String>,
    /// Conditions that make the report suspect, e.g. too many excluded trials.
    pub flags: Vec<String>,
}

/// `sqrt(log n / min(np, n^0.4))`.
pub fn error_scale(n: usize, p: f64) -> f64 {
    let n_f = n as f64;
    (n_f.ln() / (n_f * p).min(n_f.powf(ERROR_SCALE_EXPONENT))).sqrt()
}

impl ExperimentReport {
    pub fn new(name: &str, config: serde_json::Value, error_scale: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: name.to_string(),
            config,
            trials: Vec::new(),
            aggregates: BTreeMap::new(),
            summary: BTreeMap::new(),
            predicted: Vec::new(),
            error_scale: Num(error_scale),
            warnings: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn predict(&mut self, name: &str, value: f64, provenance: &str) {
        self.predicted.push(Prediction {
            name: name.to_string(),
            value: Num(value),
            provenance: provenance.to_string(),
        });
    }

    pub fn prediction(&self, name: &str) -> Option<f64> {
        self.predicted.iter().find(|p| p.name == name).map(|p| p.value.0)
    }

    pub fn set_summary(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), Num(value));
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.get(key).map(|v| v.0)
    }

    /// Mean of a measured field.
    pub fn mean(&self, field: &str) -> Option<f64> {
        self.aggregates.get(field).map(|a| a.mean.0)
    }

    /// Values of `field` across trials, in trial order.
    pub fn column(&self, field: &str) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.get(field)).collect()
    }

    /// Aggregate every field over the trials that record it, skipping trials
    /// for which `include` is false.
    pub fn aggregate_where(&mut self, include: impl Fn(&TrialRecord) -> bool) {
        let mut fields: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for t in self.trials.iter().filter(|t| include(t)) {
            for (k, v) in &t.values {
                fields.entry(k.as_str()).or_default().push(v.0);
            }
        }
        self.aggregates = fields
            .into_iter()
            .filter_map(|(k, xs)| Aggregate::of(&xs).map(|a| (k.to_string(), a)))
            .collect();
    }

    pub fn aggregate(&mut self) {
        self.aggregate_where(|_| true);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "report schema version {} is not {SCHEMA_VERSION}",
                report.schema_version
            )));
        }
        Ok(report)
    }
}

/// Write `report` as JSON. A missing parent directory is reported by name.
pub fn persist_report(report: &ExperimentReport, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, format!("directory {} does not exist", dir.display())),
            ));
        }
    }
    let mut text = report.to_json()?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentReport::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_scalars_round_trip() {
        for x in [f64::INFINITY, f64::NEG_INFINITY, f64::NAN, -0.0, 0.1 + 0.2, 1e-300] {
            let text = serde_json::to_string(&Num(x)).unwrap();
            let back: Num = serde_json::from_str(&text).unwrap();
            assert_eq!(back, Num(x), "{text}");
            if x.is_finite() {
                assert_eq!(back.0.to_bits(), x.to_bits());
            }
        }
        assert!(serde_json::from_str::<Num>("\"infinity\"").is_err());
    }

    #[test]
    fn aggregates() {
        let a = Aggregate::of(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(a.mean.0, 2.0);
        assert_eq!(a.stddev.unwrap().0, 1.0);
        assert_eq!(a.quantiles["q50"].0, 2.0);
        assert_eq!((a.min.0, a.max.0), (1.0, 3.0));
        let single = Aggregate::of(&[5.0]).unwrap();
        assert!(single.stddev.is_none());
        assert_eq!(single.quantiles["q10"].0, 5.0);
        assert!(Aggregate::of(&[]).is_none());
    }

    #[test]
    fn error_scale_uses_the_smaller_denominator() {
        // n^0.4 = 100 < np = 1000.
        let e = error_scale(100_000, 0.01);
        assert!((e - (100_000f64.ln() / 100_000f64.powf(0.4)).sqrt()).abs() < 1e-15);
        let e = error_scale(4096, 0.001);
        assert!((e - (4096f64.ln() / 4.096).sqrt()).abs() < 1e-15);
    }
}
