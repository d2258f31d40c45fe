//! Top-of-spectrum eigensolvers behind a common trait, selectable by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::sym::SymMatrix;
use crate::error::{Error, Result};

/// Sizes up to this go to the dense solver under `auto`.
pub const DENSE_CUTOFF: usize = 400;

/// Largest eigenpairs, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct TopEigs {
    pub values: Vec<f64>,
    /// Unit eigenvectors matching `values`.
    pub vectors: Vec<Vec<f64>>,
    /// `‖X v - λ v‖` per pair.
    pub residuals: Vec<f64>,
}

pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &str;

    /// The `k` algebraically largest eigenpairs of `a`.
    fn top(&self, a: &SymMatrix, k: usize) -> Result<TopEigs>;
}

fn check_k(a: &SymMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.n() {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {n}x{n} matrix",
            n = a.n()
        )));
    }
    Ok(())
}

fn residual(a: &SymMatrix, v: &[f64], lambda: f64) -> f64 {
    a.apply(v)
        .iter()
        .zip(v)
        .map(|(av, vi)| (av - lambda * vi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Eigenvalues of a dense symmetric matrix in descending order, with the
/// permutation applied to the eigenvector columns.
pub(crate) fn sorted_eigen(d: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(d);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(order.iter());
    (values, vectors)
}

/// Full spectrum by tridiagonal reduction (`nalgebra::SymmetricEigen`).
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSolver;

impl EigenSolver for DenseSolver {
    fn name(&self) -> &str {
        "dense"
    }

    fn top(&self, a: &SymMatrix, k: usize) -> Result<TopEigs> {
        check_k(a, k)?;
        let (values, vecs) = sorted_eigen(a.to_dense());
        let mut out = TopEigs {
            values: values[..k].to_vec(),
            vectors: Vec::with_capacity(k),
            residuals: Vec::with_capacity(k),
        };
        for i in 0..k {
            let v: Vec<f64> = vecs.column(i).iter().copied().collect();
            out.residuals.push(residual(a, &v, out.values[i]));
            out.vectors.push(v);
        }
        Ok(out)
    }
}

/// Thick-restart Lanczos with full reorthogonalization.
///
/// Each cycle grows an orthonormal basis `V` to `basis` vectors keeping
/// `W = X V`, solves the projected problem `VᵀW`, and keeps the leading Ritz
/// vectors plus the largest Ritz residual direction for the next cycle.
#[derive(Debug, Clone, Copy)]
pub struct LanczosSolver {
    /// Ritz pairs count as converged once `‖X y - θ y‖ < tol max(1, |θ|)`.
    pub tol: f64,
    /// Basis size; `None` picks `max(2k + 40, 80)`.
    pub basis: Option<usize>,
    /// Restart budget is `restarts_per_pair * k` cycles.
    pub restarts_per_pair: usize,
}

impl Default for LanczosSolver {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            basis: None,
            restarts_per_pair: 10,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalize `w` against the columns of `basis` (twice) and normalize.
/// Returns `None` when nothing independent is left.
fn orthonormalize(basis: &[Vec<f64>], mut w: Vec<f64>) -> Option<Vec<f64>> {
    let start = norm(&w);
    if start == 0.0 || !start.is_finite() {
        return None;
    }
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, &w);
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
        }
    }
    let after = norm(&w);
    if after <= 1e-10 * start {
        return None;
    }
    w.iter_mut().for_each(|x| *x /= after);
    Some(w)
}

/// `Σ_j coeffs[j] vectors[j]`.
fn combine(vectors: &[Vec<f64>], coeffs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for (v, c) in vectors.iter().zip(coeffs) {
        out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
    }
    out
}

impl EigenSolver for LanczosSolver {
    fn name(&self) -> &str {
        "lanczos"
    }

    fn top(&self, a: &SymMatrix, k: usize) -> Result<TopEigs> {
        check_k(a, k)?;
        let n = a.n();
        let m = self.basis.unwrap_or((2 * k + 40).max(80)).min(n).max(k + 1).min(n);
        let keep = (k + 10).min(m.saturating_sub(2)).max(k);
        let mut rng = ChaCha8Rng::seed_from_u64(0x1A9C_205);
        let mut random_vector = |basis: &[Vec<f64>]| loop {
            let w: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            if let Some(v) = orthonormalize(basis, w) {
                return v;
            }
        };

        let mut basis: Vec<Vec<f64>> = vec![random_vector(&[])];
        let mut images: Vec<Vec<f64>> = Vec::new();
        let budget = self.restarts_per_pair * k;
        for cycle in 0..=budget {
            while images.len() < basis.len() {
                images.push(a.apply(&basis[images.len()]));
                if basis.len() < m {
                    let next = orthonormalize(&basis, images.last().unwrap().clone())
                        .unwrap_or_else(|| random_vector(&basis));
                    basis.push(next);
                }
            }
            let dim = basis.len();
            let h = DMatrix::from_fn(dim, dim, |i, j| {
                0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]))
            });
            let (theta, z) = sorted_eigen(h);
            let ritz = |i: usize| -> (Vec<f64>, Vec<f64>) {
                let y = combine(&basis, z.column(i).iter().copied());
                let ay = combine(&images, z.column(i).iter().copied());
                (y, ay)
            };
            let mut converged = true;
            let mut pairs = Vec::with_capacity(k);
            for i in 0..k {
                let (y, ay) = ritz(i);
                let r: f64 = ay
                    .iter()
                    .zip(&y)
                    .map(|(p, q)| (p - theta[i] * q).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if r >= self.tol * theta[i].abs().max(1.0) {
                    converged = false;
                }
                pairs.push((y, ay, r));
            }
            // A basis spanning the whole space is exact.
            if converged || dim == n {
                let mut out = TopEigs {
                    values: theta[..k].to_vec(),
                    vectors: Vec::with_capacity(k),
                    residuals: Vec::with_capacity(k),
                };
                for (i, (y, _, _)) in pairs.into_iter().enumerate() {
                    let scale = norm(&y);
                    let v: Vec<f64> = y.iter().map(|x| x / scale).collect();
                    out.residuals.push(residual(a, &v, out.values[i]));
                    out.vectors.push(v);
                }
                return Ok(out);
            }
            if cycle == budget {
                break;
            }
            // Ritz residuals are all parallel to the next Krylov direction;
            // the largest one carries it with the least rounding noise.
            let worst = (0..k).max_by(|&i, &j| pairs[i].2.total_cmp(&pairs[j].2)).unwrap_or(0);
            let (yw, ayw, _) = &pairs[worst];
            let direction: Vec<f64> = ayw.iter().zip(yw).map(|(p, q)| p - theta[worst] * q).collect();
            let kept = keep.min(dim - 1);
            let new_basis: Vec<Vec<f64>> = (0..kept)
                .map(|i| combine(&basis, z.column(i).iter().copied()))
                .collect();
            let new_images: Vec<Vec<f64>> = (0..kept)
                .map(|i| combine(&images, z.column(i).iter().copied()))
                .collect();
            basis = new_basis;
            images = new_images;
            let next = orthonormalize(&basis, direction).unwrap_or_else(|| random_vector(&basis));
            basis.push(next);
        }
        Err(Error::NonConvergence {
            solver: "lanczos",
            detail: format!("top {k} Ritz pairs not converged after {budget} restarts (n = {n})"),
        })
    }
}

/// Dense up to [`DENSE_CUTOFF`], Lanczos above.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoSolver;

impl EigenSolver for AutoSolver {
    fn name(&self) -> &str {
        "auto"
    }

    fn top(&self, a: &SymMatrix, k: usize) -> Result<TopEigs> {
        if a.n() <= DENSE_CUTOFF || 4 * k > a.n() {
            DenseSolver.top(a, k)
        } else {
            LanczosSolver::default().top(a, k)
        }
    }
}

type SolverCtor = Box<dyn Fn() -> Arc<dyn EigenSolver> + Send + Sync>;

/// Name → eigensolver table.
pub struct SolverRegistry {
    ctors: BTreeMap<String, SolverCtor>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut reg = Self { ctors: BTreeMap::new() };
        reg.register("dense", || Arc::new(DenseSolver));
        reg.register("lanczos", || Arc::new(LanczosSolver::default()));
        reg.register("auto", || Arc::new(AutoSolver));
        reg
    }
}

impl SolverRegistry {
    pub fn register<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn() -> Arc<dyn EigenSolver> + Send + Sync + 'static,
    {
        self.ctors.insert(name.to_string(), Box::new(ctor));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ctors.keys().map(String::as_str)
    }

    pub fn make(&self, name: &str) -> Result<Arc<dyn EigenSolver>> {
        self.ctors.get(name).map(|c| c()).ok_or_else(|| Error::UnknownName {
            kind: "eigensolver",
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })
    }
}

pub fn make_solver(name: &str) -> Result<Arc<dyn EigenSolver>> {
    SolverRegistry::default().make(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_two_by_two() {
        let d = SymMatrix::from_upper(4, &[(0, 0, 3.0), (1, 1, 1.0)], 0.0).unwrap();
        for solver in [&DenseSolver as &dyn EigenSolver, &LanczosSolver::default()] {
            let t = solver.top(&d, 1).unwrap();
            assert!((t.values[0] - 3.0).abs() < 1e-12, "{}", solver.name());
            assert!((t.vectors[0][0].abs() - 1.0).abs() < 1e-10);
        }
        let a = 0.7;
        let two = SymMatrix::from_upper(2, &[(0, 1, a)], 0.0).unwrap();
        let t = DenseSolver.top(&two, 2).unwrap();
        assert!((t.values[0] - a).abs() < 1e-14 && (t.values[1] + a).abs() < 1e-14);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(make_solver("lanczos").unwrap().name(), "lanczos");
        assert!(matches!(make_solver("arnoldi"), Err(Error::UnknownName { .. })));
    }
}
