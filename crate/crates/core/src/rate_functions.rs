//! Rate functions of the top eigenvalue: the vertex rate `Î`, the full rate
//! `I = min(1/(4β m²), Î)`, the adjacency rate, and the variational problem
//! over weight, shift, tilt and degrees with its closed-form reduction.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::{h_poisson, LegendreTransform};
use crate::numeric::{bisect_expanding, scan_then_golden, RootOptions};
use crate::semicircle::{lambda_over_m, m_of};

/// Grid size of the 1-D scans preceding golden-section refinement.
pub const SCAN_POINTS: usize = 2000;

/// Largest number of degree coordinates the brute-force solvers accept.
pub const MAX_DEGREE_COORDS: usize = 6;

/// Which strategy attains the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Vertex,
    Clique,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Vertex => "vertex",
            Regime::Clique => "clique",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Closed,
}

/// Minimizing point of a variational problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Argmin {
    /// Weight `r` and squared degree `s` with `r + m s = λ`.
    Vertex { r: f64, s: f64 },
    /// Weight, shift, tilt and the individual degrees.
    Phi {
        r: f64,
        t: f64,
        kappa: f64,
        d: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalSolution {
    pub value: f64,
    pub argmin: Argmin,
    pub method: Method,
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

/// `min { (target - m s)²/(2α) + h_L(s) : 1 <= s <= target/m }`, with the
/// weight forced to zero when `α = 0`. Returns the value and the minimizing `s`.
fn weight_degree_tradeoff(tr: &LegendreTransform, alpha: f64, m: f64, target: f64) -> (f64, f64) {
    let s_hi = target / m;
    if s_hi <= 1.0 {
        return (0.0, 1.0);
    }
    if alpha == 0.0 {
        return (tr.eval(s_hi), s_hi);
    }
    let cost = |s: f64| {
        let r = target - m * s;
        r * r / (2.0 * alpha) + tr.eval(s)
    };
    let best = scan_then_golden(cost, 1.0, s_hi, SCAN_POINTS, 1e-12);
    (best.value, best.x)
}

/// `Î(λ) = inf { r²/(2α) + h_L(s) : r + m(λ) s = λ, r >= 0, s >= 1 }`,
/// equal to `h_L(λ/m(λ))` when `α = 0`.
pub fn rate_i_hat(tr: &LegendreTransform, alpha: f64, lambda: f64) -> Result<VariationalSolution> {
    check_nonnegative("alpha", alpha)?;
    let m = m_of(lambda)?;
    let (value, s) = weight_degree_tradeoff(tr, alpha, m, lambda);
    Ok(VariationalSolution {
        value,
        argmin: Argmin::Vertex {
            r: (lambda - m * s).max(0.0),
            s,
        },
        method: Method::Closed,
    })
}

/// `1/(4β m(λ)²)`, infinite when `β = 0`.
pub fn clique_term(beta: f64, lambda: f64) -> Result<f64> {
    check_nonnegative("beta", beta)?;
    let m = m_of(lambda)?;
    Ok(if beta == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (4.0 * beta * m * m)
    })
}

/// One evaluation of both strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub lambda: f64,
    pub i_hat: f64,
    pub clique: f64,
    pub i: f64,
    pub regime: Regime,
}

fn regime_of(i_hat: f64, clique: f64) -> Regime {
    if i_hat <= clique * (1.0 + 1e-12) + 1e-12 {
        Regime::Vertex
    } else {
        Regime::Clique
    }
}

pub fn rate_point(tr: &LegendreTransform, alpha: f64, beta: f64, lambda: f64) -> Result<RatePoint> {
    let clique = clique_term(beta, lambda)?;
    let i_hat = rate_i_hat(tr, alpha, lambda)?.value;
    Ok(RatePoint {
        lambda,
        i_hat,
        clique,
        i: i_hat.min(clique),
        regime: regime_of(i_hat, clique),
    })
}

/// `I(λ) = min(1/(4β m(λ)²), Î(λ))`.
pub fn rate_i(tr: &LegendreTransform, alpha: f64, beta: f64, lambda: f64) -> Result<f64> {
    Ok(rate_point(tr, alpha, beta, lambda)?.i)
}

/// Rate of the top eigenvalue of the centered adjacency matrix: `h(t/m(t))`.
pub fn adjacency_rate(t: f64) -> Result<f64> {
    h_poisson(lambda_over_m(t)?)
}

/// Crossover between the vertex and clique strategies when the diagonal is
/// bounded (`α = 0`): the zero of `h_L(t/m(t)) - 1/(4β m(t)²)`.
///
/// `None` when `h_L(2) >= 1/(4β)` (the vertex strategy wins everywhere), or
/// when no sign change is found. The zero is assumed unique.
pub fn find_phase_transition(tr: &LegendreTransform, beta: f64) -> Option<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return None;
    }
    let threshold = 1.0 / (4.0 * beta);
    if tr.eval(2.0) >= threshold {
        return None;
    }
    let gap = |t: f64| {
        let m = m_of(t).unwrap_or(1.0);
        tr.eval(t / m) - 1.0 / (4.0 * beta * m * m)
    };
    let opts = RootOptions {
        rel_tol: 1e-14,
        max_iter: 300,
    };
    bisect_expanding(gap, 2.0 + 1e-9, 3.0, 1e6, opts).ok()
}

/// Tabulated rate function.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub lambda_grid: Vec<f64>,
    pub i_hat: Vec<f64>,
    pub clique_term: Vec<f64>,
    pub i_value: Vec<f64>,
    pub regime: Vec<Regime>,
    pub t_star: Option<f64>,
}

impl RateCurve {
    /// Number of adjacent grid pairs whose regimes differ.
    pub fn regime_flips(&self) -> usize {
        self.regime.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// `lambda,i_hat,clique,i,regime` rows; infinities written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,i_hat,clique,i,regime\n");
        for k in 0..self.lambda_grid.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.lambda_grid[k], self.i_hat[k], self.clique_term[k], self.i_value[k], self.regime[k]
            ));
        }
        out
    }
}

/// Evaluate the rate on a sorted grid in `(2, inf)`.
///
/// With `α = 0` the crossover comes from [`find_phase_transition`]; otherwise
/// it is located by bisection inside the first grid cell where the regime flips.
pub fn rate_curve(tr: &LegendreTransform, alpha: f64, beta: f64, grid: &[f64]) -> Result<RateCurve> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("lambda grid must be strictly increasing".into()));
    }
    let mut curve = RateCurve {
        lambda_grid: grid.to_vec(),
        i_hat: Vec::with_capacity(grid.len()),
        clique_term: Vec::with_capacity(grid.len()),
        i_value: Vec::with_capacity(grid.len()),
        regime: Vec::with_capacity(grid.len()),
        t_star: None,
    };
    for &lambda in grid {
        let p = rate_point(tr, alpha, beta, lambda)?;
        curve.i_hat.push(p.i_hat);
        curve.clique_term.push(p.clique);
        curve.i_value.push(p.i);
        curve.regime.push(p.regime);
    }
    curve.t_star = if alpha == 0.0 {
        find_phase_transition(tr, beta)
    } else {
        match curve.regime.windows(2).position(|w| w[0] != w[1]) {
            Some(k) => {
                let gap = |l: f64| match rate_point(tr, alpha, beta, l) {
                    Ok(p) => p.i_hat - p.clique,
                    Err(_) => f64::NAN,
                };
                crate::numeric::bisect(gap, grid[k], grid[k + 1], RootOptions::default()).ok()
            }
            None => None,
        }
    };
    Ok(curve)
}

/// Search controls of [`phi_brute_with`].
#[derive(Debug, Clone, Copy)]
pub struct PhiSearch {
    /// Points per axis of the initial grid.
    pub grid: usize,
    /// Keep the shift `t` at zero.
    pub freeze_t: bool,
    pub max_sweeps: usize,
}

impl Default for PhiSearch {
    fn default() -> Self {
        Self {
            grid: 21,
            freeze_t: false,
            max_sweeps: 40,
        }
    }
}

/// The objective `r²/4 + Σ h_L(d_i) + t/(2β)` under
/// `r c(κ) + m κ ‖d - 1‖ + m t >= μ`, with `c(κ) = sqrt(β + (α/2 - β) κ²)`.
/// The weight `r` is always taken as the smallest feasible value and the
/// degrees enter only through `s = ‖d - 1‖`.
struct PhiProblem<'a> {
    tr: &'a LegendreTransform,
    alpha: f64,
    beta: f64,
    m: f64,
    mu: f64,
    k: usize,
}

impl<'a> PhiProblem<'a> {
    fn new(
        tr: &'a LegendreTransform,
        alpha: f64,
        beta: f64,
        lambda: f64,
        mu: f64,
        k: usize,
    ) -> Result<Self> {
        check_nonnegative("alpha", alpha)?;
        check_nonnegative("beta", beta)?;
        let m = m_of(lambda)?;
        if !(mu > 0.0) || mu > 1.0 / m + 1e-9 {
            return Err(Error::domain(
                "phi",
                format!("mu must lie in (0, 1/m(lambda)] = (0, {}], got {mu}", 1.0 / m),
            ));
        }
        if k == 0 || k > MAX_DEGREE_COORDS {
            return Err(Error::InvalidParameter(format!(
                "number of degree coordinates must be in 1..={MAX_DEGREE_COORDS}, got {k}"
            )));
        }
        Ok(Self {
            tr,
            alpha,
            beta,
            m,
            mu,
            k,
        })
    }

    fn tilt_coefficient(&self, kappa: f64) -> f64 {
        (self.beta + (0.5 * self.alpha - self.beta) * kappa * kappa).max(0.0).sqrt()
    }

    /// `min_{ℓ <= k} ℓ h_L(1 + s/√ℓ)` and the minimizing `ℓ`.
    fn degree_cost(&self, s: f64) -> (f64, usize) {
        if s == 0.0 {
            return (0.0, 1);
        }
        (1..=self.k)
            .map(|l| {
                let lf = l as f64;
                (lf * self.tr.eval(1.0 + s / lf.sqrt()), l)
            })
            .fold((f64::INFINITY, 1), |a, b| if b.0 < a.0 { b } else { a })
    }

    fn weight(&self, kappa: f64, s: f64, t: f64) -> Option<f64> {
        let deficit = self.mu - self.m * kappa * s - self.m * t;
        if deficit <= 1e-12 * self.mu {
            return Some(0.0);
        }
        let c = self.tilt_coefficient(kappa);
        if c == 0.0 {
            None
        } else {
            Some(deficit / c)
        }
    }

    fn cost_with_degree(&self, kappa: f64, s: f64, t: f64, degree: f64) -> f64 {
        let Some(r) = self.weight(kappa, s, t) else {
            return f64::INFINITY;
        };
        let shift = if t == 0.0 { 0.0 } else { t / (2.0 * self.beta) };
        r * r / 4.0 + degree + shift
    }

    fn cost(&self, kappa: f64, s: f64, t: f64) -> f64 {
        self.cost_with_degree(kappa, s, t, self.degree_cost(s).0)
    }

    fn s_max(&self) -> f64 {
        self.mu / self.m
    }

    fn t_max(&self, freeze_t: bool) -> f64 {
        if freeze_t || self.beta == 0.0 {
            0.0
        } else {
            self.mu / self.m
        }
    }

    fn solution(&self, kappa: f64, s: f64, t: f64, value: f64) -> VariationalSolution {
        let r = self.weight(kappa, s, t).unwrap_or(0.0);
        let (_, l) = self.degree_cost(s);
        let active = 1.0 + s / (l as f64).sqrt();
        let d = (0..self.k).map(|i| if i < l && s > 0.0 { active } else { 1.0 }).collect();
        VariationalSolution {
            value,
            argmin: Argmin::Phi { r, t, kappa, d },
            method: Method::Brute,
        }
    }
}

/// Brute-force minimum of the variational problem with default search settings.
pub fn phi_brute(
    tr: &LegendreTransform,
    alpha: f64,
    beta: f64,
    lambda: f64,
    mu: f64,
    k: usize,
) -> Result<VariationalSolution> {
    phi_brute_with(tr, alpha, beta, lambda, mu, k, PhiSearch::default())
}

/// Grid search over `(κ, s, t)` followed by coordinate descent started from
/// the best grid point of each of the most promising `κ` slices.
pub fn phi_brute_with(
    tr: &LegendreTransform,
    alpha: f64,
    beta: f64,
    lambda: f64,
    mu: f64,
    k: usize,
    search: PhiSearch,
) -> Result<VariationalSolution> {
    let prob = PhiProblem::new(tr, alpha, beta, lambda, mu, k)?;
    let g = search.grid.max(2);
    let s_max = prob.s_max();
    let t_max = prob.t_max(search.freeze_t);
    let t_points = if t_max == 0.0 { 1 } else { g };
    let node = |i: usize, hi: f64, n: usize| if n == 1 { 0.0 } else { hi * i as f64 / (n - 1) as f64 };
    let degree: Vec<f64> = (0..g).map(|j| prob.degree_cost(node(j, s_max, g)).0).collect();

    // Best (value, κ, s, t) per κ slice.
    let mut slices: Vec<(f64, f64, f64, f64)> = (0..g)
        .map(|i| {
            let kappa = node(i, 1.0, g);
            let mut best = (f64::INFINITY, kappa, 0.0, 0.0);
            for (j, &dj) in degree.iter().enumerate() {
                let s = node(j, s_max, g);
                for l in 0..t_points {
                    let t = node(l, t_max, t_points);
                    let v = prob.cost_with_degree(kappa, s, t, dj);
                    if v < best.0 {
                        best = (v, kappa, s, t);
                    }
                }
            }
            best
        })
        .collect();
    let endpoints = [slices[0], slices[g - 1]];
    slices.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut starts: Vec<(f64, f64, f64, f64)> = slices.iter().take(3).copied().collect();
    starts.extend(endpoints);

    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    for start in starts {
        if !start.0.is_finite() {
            continue;
        }
        let refined = coordinate_descent(&prob, start, s_max, t_max, search.max_sweeps);
        if refined.0 < best.0 {
            best = refined;
        }
    }
    if !best.0.is_finite() {
        return Err(Error::NonConvergence {
            solver: "phi_brute",
            detail: "no feasible grid point".into(),
        });
    }
    let (value, kappa, s, t) = best;
    Ok(prob.solution(kappa, s, t, value))
}

fn coordinate_descent(
    prob: &PhiProblem<'_>,
    start: (f64, f64, f64, f64),
    s_max: f64,
    t_max: f64,
    max_sweeps: usize,
) -> (f64, f64, f64, f64) {
    const LINE_POINTS: usize = 41;
    let (mut value, mut kappa, mut s, mut t) = start;
    for _ in 0..max_sweeps {
        let before = value;
        let e = scan_then_golden(|x| prob.cost(x, s, t), 0.0, 1.0, LINE_POINTS, 1e-12);
        if e.value < value {
            value = e.value;
            kappa = e.x;
        }
        let e = scan_then_golden(|x| prob.cost(kappa, x, t), 0.0, s_max, LINE_POINTS, 1e-12);
        if e.value < value {
            value = e.value;
            s = e.x;
        }
        if t_max > 0.0 {
            let e = scan_then_golden(|x| prob.cost(kappa, s, x), 0.0, t_max, LINE_POINTS, 1e-12);
            if e.value < value {
                value = e.value;
                t = e.x;
            }
        }
        if before - value <= 1e-13 * before.abs().max(1.0) {
            break;
        }
    }
    (value, kappa, s, t)
}

/// `min(μ²/(4β), inf { r²/(2α) + h_L(1 + d) : r + m(λ) d >= μ, r, d >= 0 })`.
pub fn phi_closed(tr: &LegendreTransform, alpha: f64, beta: f64, lambda: f64, mu: f64) -> Result<f64> {
    let prob = PhiProblem::new(tr, alpha, beta, lambda, mu, 1)?;
    let clique = if beta == 0.0 {
        f64::INFINITY
    } else {
        mu * mu / (4.0 * beta)
    };
    // With s = 1 + d the constraint reads r + m s >= μ + m.
    let (inner, _) = weight_degree_tradeoff(tr, alpha, prob.m, mu + prob.m);
    Ok(clique.min(inner))
}

/// Spreading a degree excess `s` over `k` coordinates versus concentrating it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeReduction {
    /// `min_{ℓ <= k} ℓ h_L(1 + s/√ℓ)`.
    pub symmetric: f64,
    /// Random-restart descent over the sphere `Σ (d_i - 1)² = s²`.
    pub descent: f64,
    /// Smaller of the two searches.
    pub brute: f64,
    /// `h_L(1 + s)`.
    pub closed: f64,
}

impl DegreeReduction {
    pub fn passes(&self) -> bool {
        self.brute >= self.closed - 1e-6 && self.brute <= self.closed + 1e-4
    }
}

/// Compare `min { Σ h_L(d_i) : Σ (d_i - 1)² >= s², d_i >= 1 }` over `k`
/// coordinates with its one-coordinate value `h_L(1 + s)`.
pub fn degree_reduction_check(tr: &LegendreTransform, s: f64, k: usize) -> Result<DegreeReduction> {
    check_nonnegative("s", s)?;
    if k == 0 || k > MAX_DEGREE_COORDS {
        return Err(Error::InvalidParameter(format!(
            "number of degree coordinates must be in 1..={MAX_DEGREE_COORDS}, got {k}"
        )));
    }
    let closed = if s == 0.0 { 0.0 } else { tr.eval(1.0 + s) };
    let symmetric = (1..=k)
        .map(|l| {
            let lf = l as f64;
            if s == 0.0 {
                0.0
            } else {
                lf * tr.eval(1.0 + s / lf.sqrt())
            }
        })
        .fold(f64::INFINITY, f64::min);
    let descent = if s == 0.0 {
        0.0
    } else if k == 1 {
        closed
    } else {
        sphere_descent(tr, s, k)
    };
    Ok(DegreeReduction {
        symmetric,
        descent,
        brute: symmetric.min(descent),
        closed,
    })
}

/// Minimize `Σ h_L(1 + x_i)` over `x >= 0`, `|x| = s`, by rotations in
/// coordinate planes (each keeps `x_i² + x_j²` fixed), from random starts.
fn sphere_descent(tr: &LegendreTransform, s: f64, k: usize) -> f64 {
    const RESTARTS: usize = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(0xD5C0_u64 + k as u64);
    let total = |x: &[f64]| x.iter().map(|&xi| tr.eval(1.0 + xi)).sum::<f64>();
    let mut best = f64::INFINITY;
    for _ in 0..RESTARTS {
        let mut x: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v *= s / norm);
        let mut value = total(&x);
        for _ in 0..100 {
            let before = value;
            for i in 0..k {
                for j in i + 1..k {
                    let rho = x[i].hypot(x[j]);
                    if rho == 0.0 {
                        continue;
                    }
                    let pair = |phi: f64| tr.eval(1.0 + rho * phi.cos()) + tr.eval(1.0 + rho * phi.sin());
                    let e = scan_then_golden(pair, 0.0, std::f64::consts::FRAC_PI_2, 64, 1e-12);
                    let current = tr.eval(1.0 + x[i]) + tr.eval(1.0 + x[j]);
                    if e.value < current {
                        x[i] = rho * e.x.cos();
                        x[j] = rho * e.x.sin();
                        value += e.value - current;
                    }
                }
            }
            if before - value <= 1e-13 {
                break;
            }
        }
        best = best.min(total(&x));
    }
    best
}

/// Dependence of the `k = 1`, `t = 0` problem on the tilt `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaReduction {
    /// Minimum over `κ ∈ [0, 1]` of the profile.
    pub brute: f64,
    pub closed: f64,
    pub kappa_argmin: f64,
    pub at_zero: f64,
    pub at_one: f64,
}

impl KappaReduction {
    /// How much an interior tilt beats the better endpoint.
    pub fn interior_gain(&self) -> f64 {
        self.at_zero.min(self.at_one) - self.brute
    }

    /// The optimum sits at an endpoint, or interior points gain nothing.
    pub fn endpoint_optimal(&self) -> bool {
        self.kappa_argmin <= 1e-3 || self.kappa_argmin >= 1.0 - 1e-3 || self.interior_gain() < 1e-6
    }
}

/// Minimize `r²/4 + h_L(1 + s)` subject to `r c(κ) + m κ s >= μ` for each
/// `κ` (profile over `s`), then over `κ` on a 101-point grid with refinement.
pub fn kappa_reduction_check(
    tr: &LegendreTransform,
    alpha: f64,
    beta: f64,
    lambda: f64,
    mu: f64,
) -> Result<KappaReduction> {
    if !(alpha > 0.0 || beta > 0.0) {
        return Err(Error::InvalidParameter("kappa reduction needs alpha > 0 or beta > 0".into()));
    }
    let prob = PhiProblem::new(tr, alpha, beta, lambda, mu, 1)?;
    let profile = |kappa: f64| {
        if kappa == 0.0 {
            return prob.cost(0.0, 0.0, 0.0);
        }
        let s_hi = prob.mu / (prob.m * kappa);
        scan_then_golden(|s| prob.cost(kappa, s, 0.0), 0.0, s_hi, 200, 1e-12).value
    };
    let best = scan_then_golden(profile, 0.0, 1.0, 101, 1e-9);
    Ok(KappaReduction {
        brute: best.value,
        closed: phi_closed(tr, alpha, beta, lambda, mu)?,
        kappa_argmin: best.x,
        at_zero: profile(0.0),
        at_one: profile(1.0),
    })
}

/// Free-shift versus zero-shift brute-force minima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftReduction {
    pub free: f64,
    pub frozen: f64,
    pub t_argmin: f64,
}

pub fn shift_reduction_check(
    tr: &LegendreTransform,
    alpha: f64,
    beta: f64,
    lambda: f64,
    mu: f64,
    k: usize,
) -> Result<ShiftReduction> {
    let free = phi_brute(tr, alpha, beta, lambda, mu, k)?;
    let frozen = phi_brute_with(
        tr,
        alpha,
        beta,
        lambda,
        mu,
        k,
        PhiSearch {
            freeze_t: true,
            ..PhiSearch::default()
        },
    )?;
    let t_argmin = match free.argmin {
        Argmin::Phi { t, .. } => t,
        Argmin::Vertex { .. } => 0.0,
    };
    Ok(ShiftReduction {
        free: free.value,
        frozen: frozen.value,
        t_argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entry_laws::{Gaussian, Rademacher};
    use crate::legendre::build_transform;
    use std::sync::Arc;

    const H5: f64 = 0.935_036_079_984_954_5;

    fn gaussian() -> LegendreTransform {
        build_transform(Arc::new(Gaussian)).unwrap()
    }

    fn rademacher() -> LegendreTransform {
        build_transform(Arc::new(Rademacher)).unwrap()
    }

    #[test]
    fn i_hat_examples() {
        let g = gaussian();
        assert!((rate_i_hat(&g, 0.0, 2.5).unwrap().value - H5).abs() < 1e-7);
        let r = rademacher();
        assert!((rate_i_hat(&r, 0.0, 2.5).unwrap().value - 4.047_189_562_170_502).abs() < 1e-7);
        // The feasible point s = 1, r = 1/m bounds Î from above.
        let m3 = m_of(3.0).unwrap();
        for alpha in [2.0, 3.0] {
            let v = rate_i_hat(&g, alpha, 3.0).unwrap().value;
            assert!(v <= 1.0 / (2.0 * alpha * m3 * m3) + 1e-12);
        }
        assert!(rate_i_hat(&g, 0.0, 2.0).is_err());
    }

    #[test]
    fn i_examples() {
        let g = gaussian();
        assert!((rate_i(&g, 0.0, 1.0, 2.5).unwrap() - H5).abs() < 1e-7);
        assert_eq!(clique_term(0.0, 3.0).unwrap(), f64::INFINITY);
        assert!((clique_term(1.0, 2.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adjacency_examples() {
        assert!((adjacency_rate(2.5).unwrap() - 4.047_189_562_170_502).abs() < 1e-12);
        assert!((adjacency_rate(3.0).unwrap() - 9.333_484_453_091_043).abs() < 1e-10);
        let near = adjacency_rate(2.0 + 1e-10).unwrap();
        assert!((near - 0.386_294_361_119_890_6).abs() < 1e-4);
        assert!(adjacency_rate(2.0).is_err());
    }

    #[test]
    fn gaussian_phase_transition() {
        let g = gaussian();
        let t = find_phase_transition(&g, 1.0).unwrap();
        assert!((t - 2.637_869_251_404_470_6).abs() < 1e-8, "{t}");
        let m = m_of(t).unwrap();
        assert!((g.eval(t / m) - 1.0 / (4.0 * m * m)).abs() < 1e-9);
        // 1/(4β) below h_L(2) leaves no crossover.
        assert_eq!(find_phase_transition(&g, 3.0), None);
        assert_eq!(find_phase_transition(&g, 0.0), None);
    }

    #[test]
    fn phi_closed_example() {
        let g = gaussian();
        let v = phi_closed(&g, 0.0, 1.0, 2.5, 2.0).unwrap();
        assert!((v - H5).abs() < 1e-7);
        assert!(phi_closed(&g, 0.0, 1.0, 2.5, 2.1).is_err());
        assert!(phi_closed(&g, 0.0, 1.0, 2.5, 0.0).is_err());
    }

    #[test]
    fn phi_brute_examples() {
        let g = gaussian();
        let m = m_of(2.5).unwrap();
        let at_edge = phi_brute(&g, 0.0, 1.0, 2.5, 1.0 / m, 1).unwrap();
        assert!((at_edge.value - rate_i(&g, 0.0, 1.0, 2.5).unwrap()).abs() < 1e-3);
        let tiny = phi_brute(&g, 0.0, 1.0, 2.5, 1e-6, 2).unwrap();
        assert!(tiny.value < 1e-9);
        assert!(phi_brute(&g, 0.0, 1.0, 2.5, 1.0, 7).is_err());
    }

    #[test]
    fn degree_reduction_examples() {
        let r = rademacher();
        let c = degree_reduction_check(&r, 2.0, 4).unwrap();
        assert!((c.closed - 1.295_836_866_004_329).abs() < 1e-7);
        assert!(c.passes(), "{c:?}");
        let g = gaussian();
        let c = degree_reduction_check(&g, 4.0, 6).unwrap();
        assert!((c.closed - H5).abs() < 1e-7);
        assert!(c.passes(), "{c:?}");
        let z = degree_reduction_check(&g, 0.0, 3).unwrap();
        assert_eq!((z.brute, z.closed), (0.0, 0.0));
    }

    #[test]
    fn kappa_prefers_full_tilt_when_diagonal_heavy() {
        let g = gaussian();
        let c = kappa_reduction_check(&g, 2.0, 1.0, 3.0, 1.5).unwrap();
        assert!(c.kappa_argmin > 1.0 - 1e-3, "{c:?}");
        assert!((c.brute - c.closed).abs() < 5e-3);
    }
}
