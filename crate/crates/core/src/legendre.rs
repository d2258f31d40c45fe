//! Numerical Legendre transform `h_L(x) = sup_θ {θx - L(θ) + 1}` of a
//! squared-entry MGF, and the Poisson rate `h(x) = x log x - x + 1`.

use std::fmt;
use std::sync::Arc;

use crate::entry_laws::EntryLaw;
use crate::error::{Error, Result};
use crate::numeric::golden_max;

/// Default lower end of the maximizer search.
const THETA_FLOOR: f64 = -40.0;
/// `L'` above this counts as divergent.
const DIVERGENCE_THRESHOLD: f64 = 1e12;
/// Number of dyadic probes `θ_max (1 - 2^{-k})` used to find `x⋆`.
const EDGE_PROBES: i32 = 40;
const GOLDEN_TOL: f64 = 1e-11;

/// `h_L` of one law, with its domain edge and linear-branch constants.
#[derive(Clone)]
pub struct LegendreTransform {
    law: Arc<dyn EntryLaw>,
    beta: f64,
    theta_max: f64,
    x_star: f64,
    l_star: f64,
}

impl fmt::Debug for LegendreTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LegendreTransform")
            .field("law", &self.law.name())
            .field("beta", &self.beta)
            .field("theta_max", &self.theta_max)
            .field("x_star", &self.x_star)
            .field("l_star", &self.l_star)
            .finish()
    }
}

/// Central difference of `L` at `theta`, kept inside the domain.
fn derivative_near_edge(law: &dyn EntryLaw, theta: f64, theta_max: f64) -> f64 {
    let h = (1e-6 * theta.abs().max(1.0)).min(0.5 * (theta_max - theta));
    (law.squared_mgf(theta + h) - law.squared_mgf(theta - h)) / (2.0 * h)
}

/// Build the transform of `law`'s squared-entry MGF.
///
/// When `1/(2β)` is finite, `L'` is probed at `θ_max (1 - 2^{-k})`. If it
/// passes [`DIVERGENCE_THRESHOLD`] then `x⋆ = inf`; otherwise the probe whose
/// estimate changed least from its predecessor gives `x⋆`, before rounding
/// noise in the shrinking difference step takes over.
pub fn build_transform(law: Arc<dyn EntryLaw>) -> Result<LegendreTransform> {
    let l0 = law.squared_mgf(0.0);
    if !((l0 - 1.0).abs() < 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "law `{}` has L(0) = {l0}, expected 1",
            law.name()
        )));
    }
    let beta = law.tail_parameter();
    let theta_max = law.theta_max();
    let (mut x_star, mut l_star) = (f64::INFINITY, f64::INFINITY);
    if theta_max.is_finite() {
        let mut prev = f64::NAN;
        let mut best_change = f64::INFINITY;
        let mut diverged = false;
        let mut candidate = (f64::INFINITY, f64::INFINITY);
        for k in 1..=EDGE_PROBES {
            let theta = theta_max * (1.0 - 2f64.powi(-k));
            let d = derivative_near_edge(law.as_ref(), theta, theta_max);
            if !d.is_finite() || d > DIVERGENCE_THRESHOLD {
                diverged = true;
                break;
            }
            let change = (d - prev).abs();
            if change <= best_change {
                best_change = change;
                candidate = (d, law.squared_mgf(theta));
            }
            prev = d;
        }
        if !diverged {
            let at_edge = law.squared_mgf(theta_max);
            x_star = candidate.0;
            l_star = if at_edge.is_finite() { at_edge } else { candidate.1 };
        }
    }
    Ok(LegendreTransform {
        law,
        beta,
        theta_max,
        x_star,
        l_star,
    })
}

impl LegendreTransform {
    pub fn law(&self) -> &Arc<dyn EntryLaw> {
        &self.law
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// Limit of `L'(θ)` at the domain edge (`inf` when divergent).
    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    /// Limit of `L(θ)` at the domain edge; meaningful when `x⋆` is finite.
    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    /// `h_L(x)`, rejecting `x <= 0`.
    pub fn h_l(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("h_L", format!("requires x > 0, got {x}")));
        }
        Ok(self.eval(x))
    }

    /// `h_L(x)` for `x > 0`; no domain check.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        if x >= self.x_star {
            return x / (2.0 * self.beta) - self.l_star + 1.0;
        }
        let objective = |theta: f64| theta * x - self.law.squared_mgf(theta) + 1.0;
        let mut lo = THETA_FLOOR;
        let mut hi = if self.theta_max.is_finite() {
            self.theta_max
        } else {
            THETA_FLOOR.abs().max(4.0 * x)
        };
        let mut best = golden_max(objective, lo, hi, GOLDEN_TOL);
        for _ in 0..16 {
            let width = hi - lo;
            let near_lo = best.x - lo < 1e-6 * width;
            let near_hi = !self.theta_max.is_finite() && hi - best.x < 1e-6 * width;
            if !near_lo && !near_hi {
                break;
            }
            if near_lo {
                lo *= 2.0;
            }
            if near_hi {
                hi *= 2.0;
            }
            best = golden_max(objective, lo, hi, GOLDEN_TOL);
        }
        best.value.max(0.0)
    }

    /// `h_L'(x)` by central differences with step `1e-5 max(1, x)`, exactly
    /// `1/(2β)` on the linear branch.
    pub fn h_l_prime(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("h_L'", format!("requires x > 0, got {x}")));
        }
        if x >= self.x_star {
            return Ok(1.0 / (2.0 * self.beta));
        }
        let h = (1e-5 * x.max(1.0)).min(0.5 * x);
        Ok((self.eval(x + h) - self.eval(x - h)) / (2.0 * h))
    }
}

/// `h(x) = x log x - x + 1`.
pub fn h_poisson(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("h_poisson", format!("requires x > 0, got {x}")));
    }
    Ok(x * x.ln() - x + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entry_laws::{Gaussian, Rademacher, UniformBounded};

    fn gaussian() -> LegendreTransform {
        build_transform(Arc::new(Gaussian)).unwrap()
    }

    fn rademacher() -> LegendreTransform {
        build_transform(Arc::new(Rademacher)).unwrap()
    }

    #[test]
    fn edge_constants() {
        let g = gaussian();
        assert_eq!(g.theta_max(), 0.5);
        assert_eq!(g.x_star(), f64::INFINITY);
        let r = rademacher();
        assert_eq!(r.theta_max(), f64::INFINITY);
        assert_eq!(r.x_star(), f64::INFINITY);
    }

    #[test]
    fn examples() {
        let g = gaussian();
        assert!((g.h_l(8.0).unwrap() - 2.0).abs() < 1e-7);
        assert!((g.h_l(5.0).unwrap() - 0.935_036_079_984_954_5).abs() < 1e-7);
        assert!((g.h_l(2.0).unwrap() - 0.110_118_425_157_690_25).abs() < 1e-7);
        let r = rademacher();
        assert!((r.h_l(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-7);
        assert!(g.h_l(0.0).is_err());
        assert!(g.h_l(-1.0).is_err());
    }

    #[test]
    fn poisson_rate() {
        assert_eq!(h_poisson(1.0).unwrap(), 0.0);
        assert!((h_poisson(5.0).unwrap() - 4.047_189_562_170_502).abs() < 1e-14);
        assert!((h_poisson(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(h_poisson(0.0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let r = rademacher();
        assert!(r.h_l_prime(1.0).unwrap().abs() < 1e-5);
        assert!((r.h_l_prime(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-5);
        assert!((gaussian().h_l_prime(8.0).unwrap() - 0.375).abs() < 1e-5);
    }

    #[test]
    fn uniform_is_nonnegative_with_zero_at_one() {
        let u = build_transform(Arc::new(UniformBounded)).unwrap();
        assert!(u.h_l(1.0).unwrap() < 1e-10);
        for x in [0.2, 0.7, 1.3, 2.5, 4.0] {
            assert!(u.h_l(x).unwrap() > 0.0);
        }
        assert!(u.h_l(4.0).unwrap() > u.h_l(2.5).unwrap());
    }
}
