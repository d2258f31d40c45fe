use super::sym::SymMatrix;
use crate::error::{Error, Result};

/// Relative residual at which conjugate gradients stop.
pub const CG_TOL: f64 = 1e-10;

/// Solve `(λ - X) w = u` by conjugate gradients. The operator is positive
/// definite only when `λ` is above the spectrum; callers check that.
pub fn shifted_solve(a: &SymMatrix, lambda: f64, u: &[f64]) -> Result<Vec<f64>> {
    let n = a.n();
    let mut w = vec![0.0; n];
    let mut r = u.to_vec();
    let mut d = r.clone();
    let mut rr: f64 = r.iter().map(|x| x * x).sum();
    let target = CG_TOL * rr.sqrt();
    let mut ad = vec![0.0; n];
    for _ in 0..(10 * n).max(100) {
        if rr.sqrt() <= target {
            return Ok(w);
        }
        a.matvec(&d, &mut ad);
        // (λ - X) d
        ad.iter_mut().zip(&d).for_each(|(x, di)| *x = lambda * di - *x);
        let curvature: f64 = d.iter().zip(&ad).map(|(x, y)| x * y).sum();
        if !(curvature > 0.0) {
            return Err(Error::NonConvergence {
                solver: "conjugate gradient",
                detail: format!("operator not positive definite at lambda = {lambda}"),
            });
        }
        let step = rr / curvature;
        w.iter_mut().zip(&d).for_each(|(wi, di)| *wi += step * di);
        r.iter_mut().zip(&ad).for_each(|(ri, x)| *ri -= step * x);
        let rr_next: f64 = r.iter().map(|x| x * x).sum();
        let ratio = rr_next / rr;
        d.iter_mut().zip(&r).for_each(|(di, ri)| *di = ri + ratio * *di);
        rr = rr_next;
    }
    Err(Error::NonConvergence {
        solver: "conjugate gradient",
        detail: format!("residual {} above {target}", rr.sqrt()),
    })
}

/// [`shifted_solve`] for several right-hand sides at once. Each column runs
/// its own conjugate-gradient recursion; the columns share one sparse
/// product per iteration.
pub fn shifted_solve_many(a: &SymMatrix, lambda: f64, us: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.n();
    let b = us.len();
    if b == 0 {
        return Ok(Vec::new());
    }
    if us.iter().any(|u| u.len() != n) {
        return Err(Error::InvalidParameter(format!("right-hand sides must have length {n}")));
    }
    let at = |i: usize, c: usize| i * b + c;
    let mut w = vec![0.0; n * b];
    let mut r = vec![0.0; n * b];
    for (c, u) in us.iter().enumerate() {
        for i in 0..n {
            r[at(i, c)] = u[i];
        }
    }
    let mut d = r.clone();
    let column_sq = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; b];
        for row in v.chunks_exact(b) {
            out.iter_mut().zip(row).for_each(|(o, x)| *o += x * x);
        }
        out
    };
    let mut rr = column_sq(&r);
    let targets: Vec<f64> = rr.iter().map(|x| CG_TOL * x.sqrt()).collect();
    let mut ad = vec![0.0; n * b];
    for _ in 0..(10 * n).max(100) {
        let active: Vec<bool> = rr.iter().zip(&targets).map(|(x, t)| x.sqrt() > *t).collect();
        if !active.contains(&true) {
            return Ok((0..b).map(|c| (0..n).map(|i| w[at(i, c)]).collect()).collect());
        }
        a.matmat(&d, b, &mut ad);
        ad.iter_mut().zip(&d).for_each(|(x, di)| *x = lambda * di - *x);
        let mut curvature = vec![0.0; b];
        for (drow, arow) in d.chunks_exact(b).zip(ad.chunks_exact(b)) {
            for c in 0..b {
                curvature[c] += drow[c] * arow[c];
            }
        }
        let mut step = vec![0.0; b];
        for c in 0..b {
            if !active[c] {
                continue;
            }
            if !(curvature[c] > 0.0) {
                return Err(Error::NonConvergence {
                    solver: "conjugate gradient",
                    detail: format!("operator not positive definite at lambda = {lambda}"),
                });
            }
            step[c] = rr[c] / curvature[c];
        }
        for k in 0..n * b {
            let c = k % b;
            w[k] += step[c] * d[k];
            r[k] -= step[c] * ad[k];
        }
        let rr_next = column_sq(&r);
        for k in 0..n * b {
            let c = k % b;
            if active[c] {
                d[k] = r[k] + rr_next[c] / rr[c] * d[k];
            }
        }
        for c in 0..b {
            if active[c] {
                rr[c] = rr_next[c];
            }
        }
    }
    Err(Error::NonConvergence {
        solver: "conjugate gradient",
        detail: format!("block of {b} right-hand sides did not reach tolerance {CG_TOL}"),
    })
}

/// `⟨u, (λ - X)^{-1} u⟩` given a known top eigenvalue `top` of `X`.
pub fn resolvent_quadratic_above(a: &SymMatrix, lambda: f64, u: &[f64], top: f64) -> Result<f64> {
    if !(lambda > top + 1e-6) {
        return Err(Error::SpectrumOverlap { lambda, top });
    }
    let w = shifted_solve(a, lambda, u)?;
    Ok(u.iter().zip(&w).map(|(x, y)| x * y).sum())
}

/// `⟨u, (λ - X)^{-1} u⟩` for every `u`, given a known top eigenvalue `top`.
pub fn resolvent_quadratics_above(a: &SymMatrix, lambda: f64, us: &[Vec<f64>], top: f64) -> Result<Vec<f64>> {
    if !(lambda > top + 1e-6) {
        return Err(Error::SpectrumOverlap { lambda, top });
    }
    let ws = shifted_solve_many(a, lambda, us)?;
    Ok(us
        .iter()
        .zip(&ws)
        .map(|(u, w)| u.iter().zip(w).map(|(x, y)| x * y).sum())
        .collect())
}
