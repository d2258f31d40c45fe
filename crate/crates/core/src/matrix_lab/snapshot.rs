//! Triplet CSV snapshots of sampled matrices.
//!
//! Line 1 is the header `n,p,model,seed`, line 2 its values, then one
//! `i,j,value` row per stored upper-triangle entry of the sparse part. The
//! constant part of the centered adjacency model is implied by `model`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Model, SymMatrix, WignerSample};
use crate::error::{Error, Result};

pub fn snapshot_csv(sample: &WignerSample) -> String {
    let mut out = String::from("n,p,model,seed\n");
    let _ = writeln!(out, "{},{},{},{}", sample.n, sample.p, sample.model.label(), sample.seed);
    out.push_str("i,j,value\n");
    for (i, j, v) in sample.matrix.upper_triplets() {
        let _ = writeln!(out, "{i},{j},{v}");
    }
    out
}

pub fn write_snapshot(sample: &WignerSample, path: &Path) -> Result<()> {
    fs::write(path, snapshot_csv(sample)).map_err(|e| Error::io(path, e))
}

/// Contents of a snapshot file. Entry laws are not recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub p: f64,
    pub model: String,
    pub seed: u64,
    pub matrix: SymMatrix,
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines();
    let bad = |what: &str| Error::Parse(format!("snapshot: {what}"));
    if lines.next() != Some("n,p,model,seed") {
        return Err(bad("missing header"));
    }
    let fields: Vec<&str> = lines.next().ok_or_else(|| bad("missing header values"))?.split(',').collect();
    if fields.len() != 4 {
        return Err(bad("header values need 4 fields"));
    }
    let n: usize = fields[0].parse().map_err(|_| bad("bad n"))?;
    let p: f64 = fields[1].parse().map_err(|_| bad("bad p"))?;
    let model = fields[2].to_string();
    let seed: u64 = fields[3].parse().map_err(|_| bad("bad seed"))?;
    if lines.next() != Some("i,j,value") {
        return Err(bad("missing triplet header"));
    }
    let mut upper = Vec::new();
    for line in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(bad(&format!("bad triplet line `{line}`")));
        }
        let i: usize = parts[0].parse().map_err(|_| bad("bad row index"))?;
        let j: usize = parts[1].parse().map_err(|_| bad("bad column index"))?;
        let v: f64 = parts[2].parse().map_err(|_| bad("bad value"))?;
        upper.push((i, j, v));
    }
    let shift = match model.as_str() {
        "adjacency_centered" => Model::AdjacencyCentered.shift(n, p),
        "wigner" => 0.0,
        other => return Err(bad(&format!("unknown model `{other}`"))),
    };
    let matrix = SymMatrix::from_upper(n, &upper, shift)?;
    Ok(Snapshot {
        n,
        p,
        model,
        seed,
        matrix,
    })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text)
}
