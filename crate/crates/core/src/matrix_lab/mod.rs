//! Sparse Wigner and centered adjacency samplers, top-of-spectrum solvers,
//! degree and localization diagnostics, and resolvent quadratic forms.

mod eigen;
mod resolvent;
mod snapshot;
mod sym;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entry_laws::{make_law, EntryLaw, LawSpec};
use crate::error::{Error, Result};
use crate::rng::CounterStreams;

pub use eigen::{
    make_solver, AutoSolver, DenseSolver, EigenSolver, LanczosSolver, SolverRegistry, TopEigs, DENSE_CUTOFF,
};
pub use resolvent::{resolvent_quadratic_above, resolvent_quadratics_above, shifted_solve, shifted_solve_many, CG_TOL};
pub use snapshot::{parse_snapshot, read_snapshot, snapshot_csv, write_snapshot, Snapshot};
pub use sym::SymMatrix;

pub const MAX_N: usize = 16384;

/// Thresholds at which the top eigenvector's localized mass is reported.
pub const DEFAULT_EPS_GRID: [f64; 5] = [0.0, 0.1, 0.2, 0.3, 0.5];

/// Matrix model. Both are scaled by `1/sqrt(np)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// `(G ∘ Ξ)/sqrt(np)`, the diagonal included, with separate laws for the
    /// off-diagonal and diagonal weights.
    Wigner { offdiag: LawSpec, diag: LawSpec },
    /// `(Adj - E Adj)/sqrt(np)` for an Erdős–Rényi graph without loops.
    AdjacencyCentered,
}

impl Model {
    /// Wigner model with the same law on and off the diagonal.
    pub fn wigner(law: LawSpec) -> Self {
        Model::Wigner {
            offdiag: law.clone(),
            diag: law,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Model::Wigner { .. } => "wigner",
            Model::AdjacencyCentered => "adjacency_centered",
        }
    }

    /// Constant added to every entry.
    pub fn shift(&self, n: usize, p: f64) -> f64 {
        match self {
            Model::Wigner { .. } => 0.0,
            Model::AdjacencyCentered => -p / (n as f64 * p).sqrt(),
        }
    }
}

/// One sampled matrix with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSample {
    pub n: usize,
    pub p: f64,
    pub model: Model,
    pub seed: u64,
    pub matrix: SymMatrix,
}

fn check_size(n: usize, p: f64) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::InvalidParameter(format!("n must be in [2, {MAX_N}], got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be in (0, 1], got {p}")));
    }
    if (n as f64) * p < 4.0 * (n as f64).ln() {
        log::warn!("np = {} is below 4 log n = {}; outside the supercritical regime", n as f64 * p, 4.0 * (n as f64).ln());
    }
    Ok(())
}

/// Whether `np >= 4 log n`.
pub fn is_supercritical(n: usize, p: f64) -> bool {
    n as f64 * p >= 4.0 * (n as f64).ln()
}

/// Columns `j >= first` of one row that carry an edge, i.i.d. Bernoulli(p),
/// drawn by geometric skips.
fn bernoulli_columns(rng: &mut dyn RngCore, first: usize, n: usize, p: f64, mut visit: impl FnMut(usize, &mut dyn RngCore)) {
    if p >= 1.0 {
        for j in first..n {
            visit(j, rng);
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut j = first;
    loop {
        let u = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        if !(gap < (n - j) as f64) {
            return;
        }
        j += gap as usize;
        visit(j, rng);
        j += 1;
        if j >= n {
            return;
        }
    }
}

/// Row `i` of the pattern and weights comes from stream `i` of the seed, so
/// a sample does not depend on how rows are scheduled across threads.
fn sample_upper<F>(n: usize, p: f64, seed: u64, first_offset: usize, entry: F) -> Vec<(usize, usize, f64)>
where
    F: Fn(usize, usize, &mut dyn RngCore) -> f64 + Sync,
{
    let streams = CounterStreams::new(seed);
    let rows: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(i as u64);
            let mut out = Vec::with_capacity(((n - i) as f64 * p * 1.2) as usize + 4);
            bernoulli_columns(&mut rng, i + first_offset, n, p, |j, r| out.push((i, j, entry(i, j, r))));
            out
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// `X = (G ∘ Ξ)/sqrt(np)` with `offdiag` weights above the diagonal and
/// `diag` weights on it.
pub fn sample_wigner(
    n: usize,
    p: f64,
    offdiag: &dyn EntryLaw,
    diag: &dyn EntryLaw,
    seed: u64,
) -> Result<WignerSample> {
    check_size(n, p)?;
    let scale = 1.0 / (n as f64 * p).sqrt();
    let upper = sample_upper(n, p, seed, 0, |i, j, rng| {
        let g = if i == j { diag.sample(rng) } else { offdiag.sample(rng) };
        g * scale
    });
    Ok(WignerSample {
        n,
        p,
        model: Model::Wigner {
            offdiag: offdiag.spec(),
            diag: diag.spec(),
        },
        seed,
        matrix: SymMatrix::from_upper(n, &upper, 0.0)?,
    })
}

/// `(Adj - p J)/sqrt(np)` for a loopless graph: `(ξ - p)/sqrt(np)` off the
/// diagonal and `-p/sqrt(np)` on it.
pub fn sample_adjacency_centered(n: usize, p: f64, seed: u64) -> Result<WignerSample> {
    check_size(n, p)?;
    let model = Model::AdjacencyCentered;
    let scale = 1.0 / (n as f64 * p).sqrt();
    let upper = sample_upper(n, p, seed, 1, |_, _, _| scale);
    Ok(WignerSample {
        n,
        p,
        seed,
        matrix: SymMatrix::from_upper(n, &upper, model.shift(n, p))?,
        model,
    })
}

/// Sample any model, building Wigner laws through the law registry.
pub fn sample_model(n: usize, p: f64, model: &Model, seed: u64) -> Result<WignerSample> {
    match model {
        Model::Wigner { offdiag, diag } => {
            let off = make_law(offdiag)?;
            let on = make_law(diag)?;
            sample_wigner(n, p, off.as_ref(), on.as_ref(), seed)
        }
        Model::AdjacencyCentered => sample_adjacency_centered(n, p, seed),
    }
}

/// Entries of a unit vector above `eps` in absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPoint {
    pub eps: f64,
    pub count: usize,
    /// Sum of squares of the kept entries.
    pub mass: f64,
    /// `sqrt(mass)`, the norm of the kept sub-vector.
    pub norm: f64,
}

pub fn localization_profile(v: &[f64], eps_grid: &[f64]) -> Result<Vec<LocalizationPoint>> {
    let total: f64 = v.iter().map(|x| x * x).sum();
    if (total.sqrt() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "localization profile needs a unit vector, norm is {}",
            total.sqrt()
        )));
    }
    Ok(eps_grid
        .iter()
        .map(|&eps| {
            let (count, mass) = v
                .iter()
                .filter(|x| x.abs() > eps)
                .fold((0, 0.0), |(c, m), x| (c + 1, m + x * x));
            LocalizationPoint {
                eps,
                count,
                mass,
                norm: mass.sqrt(),
            }
        })
        .collect())
}

/// Top eigenvalues, top eigenvector, degrees and localization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub top_eigs: Vec<f64>,
    pub top_vec: Vec<f64>,
    /// `‖X v - λ₁ v‖` of the top pair.
    pub residual: f64,
    /// Squared column norms with the diagonal zeroed.
    pub degrees: Vec<f64>,
    pub max_degree: f64,
    pub localized_mass: Vec<LocalizationPoint>,
}

pub fn top_eigs(a: &SymMatrix, k: usize) -> Result<SpectralSummary> {
    summarize(a, k, &AutoSolver, &DEFAULT_EPS_GRID)
}

pub fn summarize(a: &SymMatrix, k: usize, solver: &dyn EigenSolver, eps_grid: &[f64]) -> Result<SpectralSummary> {
    let top = solver.top(a, k)?;
    let degrees = a.offdiag_degrees();
    let max_degree = degrees.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top_vec = top.vectors[0].clone();
    Ok(SpectralSummary {
        localized_mass: localization_profile(&top_vec, eps_grid)?,
        top_eigs: top.values,
        residual: top.residuals[0],
        top_vec,
        degrees,
        max_degree,
    })
}

/// `‖X̌_i‖²`: squared column norms with the diagonal entry zeroed.
pub fn degrees(a: &SymMatrix) -> Vec<f64> {
    a.offdiag_degrees()
}

/// `(#positive, #negative)` pivots of `LDLᵀ` of `X - τ I`, or `None` when a
/// pivot is too small to trust.
fn ldl_inertia(a: &SymMatrix, threshold: f64) -> Option<(usize, usize)> {
    let n = a.n();
    let mut m = a.to_dense();
    for i in 0..n {
        m[(i, i)] -= threshold;
    }
    let scale = m.amax().max(1.0);
    let mut l = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut d = vec![0.0; n];
    let (mut pos, mut neg) = (0, 0);
    for j in 0..n {
        let mut dj = m[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if dj.abs() < 1e-12 * scale || !dj.is_finite() {
            return None;
        }
        d[j] = dj;
        if dj > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }
    Some((pos, neg))
}

/// Number of eigenvalues above `threshold`.
///
/// Small matrices use the inertia of `X - τ I`, falling back to the full
/// spectrum when the factorization meets a tiny pivot. Large ones ask Lanczos
/// for a growing number of top eigenvalues until one falls below `τ`.
pub fn count_eigs_above(a: &SymMatrix, threshold: f64) -> Result<usize> {
    let n = a.n();
    if threshold.is_nan() {
        return Err(Error::InvalidParameter("threshold is NaN".into()));
    }
    if threshold == f64::NEG_INFINITY {
        return Ok(n);
    }
    if threshold == f64::INFINITY {
        return Ok(0);
    }
    if n <= DENSE_CUTOFF {
        if let Some((pos, _)) = ldl_inertia(a, threshold) {
            return Ok(pos);
        }
        let (values, _) = eigen::sorted_eigen(a.to_dense());
        return Ok(values.iter().filter(|&&v| v >= threshold).count());
    }
    let mut k = 4.min(n);
    loop {
        let top = AutoSolver.top(a, k)?;
        let count = top.values.iter().filter(|&&v| v >= threshold).count();
        if count < k || k == n {
            return Ok(count);
        }
        k = (2 * k).min(n);
    }
}

/// `⟨u, (λ - X)^{-1} u⟩` for a unit vector `u`, with `λ` required to lie
/// above the top eigenvalue.
pub fn resolvent_quadratic(a: &SymMatrix, lambda: f64, u: &[f64]) -> Result<f64> {
    let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (nu - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("u must be a unit vector, norm is {nu}")));
    }
    let top = AutoSolver.top(a, 1)?.values[0];
    resolvent_quadratic_above(a, lambda, u, top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entry_laws::{Gaussian, Rademacher};

    #[test]
    fn dense_rademacher_at_full_density() {
        let s = sample_wigner(30, 1.0, &Rademacher, &Rademacher, 5).unwrap();
        let scale = 1.0 / 30f64.sqrt();
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(s.matrix.get(i, j).abs(), scale);
            }
        }
        for d in degrees(&s.matrix) {
            assert!((d - 29.0 / 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adjacency_entries_are_two_point() {
        let (n, p) = (200, 0.1);
        let s = sample_adjacency_centered(n, p, 3).unwrap();
        let scale = 1.0 / (n as f64 * p).sqrt();
        for i in 0..n {
            assert!((s.matrix.get(i, i) + p * scale).abs() < 1e-15);
            for j in i + 1..n {
                let v = s.matrix.get(i, j);
                assert!((v - (1.0 - p) * scale).abs() < 1e-15 || (v + p * scale).abs() < 1e-15);
            }
        }
        assert!(s.matrix.is_symmetric());
    }

    #[test]
    fn localization_examples() {
        let mut e1 = vec![0.0; 10];
        e1[0] = 1.0;
        let p = localization_profile(&e1, &[0.5]).unwrap();
        assert_eq!((p[0].count, p[0].mass), (1, 1.0));
        let flat = vec![1.0 / 10f64.sqrt(); 10];
        let p = localization_profile(&flat, &[0.0, 0.4]).unwrap();
        assert!((p[0].mass - 1.0).abs() < 1e-12);
        assert_eq!((p[1].count, p[1].mass), (0, 0.0));
        assert!(localization_profile(&[0.5, 0.5], &[0.1]).is_err());
    }

    #[test]
    fn count_examples() {
        let z = SymMatrix::zeros(5);
        assert_eq!(count_eigs_above(&z, 1.0).unwrap(), 0);
        assert_eq!(count_eigs_above(&z, f64::NEG_INFINITY).unwrap(), 5);
        // The zero pivot at threshold 0 forces the fallback.
        assert_eq!(count_eigs_above(&z, 0.0).unwrap(), 5);
        let s = sample_wigner(60, 0.5, &Gaussian, &Gaussian, 1).unwrap();
        let (values, _) = eigen::sorted_eigen(s.matrix.to_dense());
        for t in [-1.0, 0.0, 0.7, 1.5] {
            let expected = values.iter().filter(|&&v| v >= t).count();
            assert_eq!(count_eigs_above(&s.matrix, t).unwrap(), expected);
        }
    }

    #[test]
    fn resolvent_of_zero_and_diagonal() {
        let z = SymMatrix::zeros(4);
        let u = [0.5, 0.5, 0.5, 0.5];
        assert!((resolvent_quadratic(&z, 3.0, &u).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let d = SymMatrix::from_upper(3, &[(0, 0, 1.0), (1, 1, -2.0), (2, 2, 0.5)], 0.0).unwrap();
        let e2 = [0.0, 1.0, 0.0];
        assert!((resolvent_quadratic(&d, 3.0, &e2).unwrap() - 0.2).abs() < 1e-12);
        assert!(matches!(
            resolvent_quadratic(&d, 1.0, &e2),
            Err(Error::SpectrumOverlap { .. })
        ));
    }
}
