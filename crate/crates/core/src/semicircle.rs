//! Semicircle Stieltjes transform on `(2, inf)`, the degree/eigenvalue maps,
//! and the secular equations locating outliers created by the two plants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, RootOptions};

/// Points at or below `2 + EDGE_GUARD` are rejected.
pub const EDGE_GUARD: f64 = 1e-12;

/// Left offset of the vertex secular bracket from `max(2, r)`.
const VERTEX_BRACKET_OFFSET: f64 = 1e-9;

fn check_above_edge(op: &'static str, lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda <= 2.0 + EDGE_GUARD {
        return Err(Error::domain(op, format!("requires lambda > 2, got {lambda}")));
    }
    Ok(())
}

/// A spectral location strictly outside the bulk `[-2, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EdgePoint(f64);

impl EdgePoint {
    pub fn new(lambda: f64) -> Result<Self> {
        check_above_edge("EdgePoint::new", lambda)?;
        Ok(Self(lambda))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn m(self) -> f64 {
        stieltjes(self.0)
    }
}

/// `m(lambda) = (lambda - sqrt(lambda^2 - 4)) / 2`, evaluated as
/// `2 / (lambda + sqrt((lambda-2)(lambda+2)))` to avoid cancellation.
fn stieltjes(lambda: f64) -> f64 {
    2.0 / (lambda + ((lambda - 2.0) * (lambda + 2.0)).sqrt())
}

/// Stieltjes transform of the standard semicircle law at a real point above the bulk.
pub fn m_of(lambda: f64) -> Result<f64> {
    check_above_edge("m_of", lambda)?;
    Ok(stieltjes(lambda))
}

/// Inverse of [`m_of`]: `y + 1/y` for `y` in `(0, 1)`.
pub fn m_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain("m_inverse", format!("requires 0 < y < 1, got {y}")));
    }
    Ok(y + 1.0 / y)
}

/// `lambda / m(lambda)`, the degree that places the outlier at `lambda`.
pub fn lambda_over_m(lambda: f64) -> Result<f64> {
    check_above_edge("lambda_over_m", lambda)?;
    Ok(lambda / stieltjes(lambda))
}

/// `d / sqrt(d - 1)`: left inverse of [`lambda_over_m`] on `[2, inf)`.
pub fn degree_to_lambda(d: f64) -> Result<f64> {
    if d.is_nan() || d < 2.0 {
        return Err(Error::domain("degree_to_lambda", format!("requires d >= 2, got {d}")));
    }
    Ok(d / (d - 1.0).sqrt())
}

/// Strength of a planted perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantStrength {
    /// Rank-one plant `y e e^T`.
    Clique { y: f64 },
    /// Vertex weight `r` with squared degree `s`.
    Vertex { r: f64, s: f64 },
}

/// Predicted outlier location of a planted perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbpPrediction {
    pub strength: PlantStrength,
    pub predicted_location: f64,
}

/// Outlier of `X + y e e^T`: the zero of `1 - y m(z)` above the bulk.
///
/// The closed form `y + 1/y` is cross-checked against bisection on the
/// secular function.
pub fn clique_secular_root(y: f64) -> Result<BbpPrediction> {
    if y.is_nan() || y <= 1.0 {
        return Err(Error::domain(
            "clique_secular_root",
            format!("requires y > 1 (no outlier otherwise), got {y}"),
        ));
    }
    let closed = m_inverse(1.0 / y)?;
    let secular = |z: f64| 1.0 - y * stieltjes(z);
    let lo = 2.0 + (closed - 2.0) * 0.5;
    let mut hi = closed + 1.0;
    while secular(hi) <= 0.0 {
        hi *= 2.0;
    }
    let bisected = bisect(secular, lo, hi, RootOptions::default())?;
    if (bisected - closed).abs() > 1e-10 * closed.max(1.0) {
        return Err(Error::NonConvergence {
            solver: "clique_secular_root",
            detail: format!("closed form {closed} and bisection {bisected} disagree"),
        });
    }
    Ok(BbpPrediction {
        strength: PlantStrength::Clique { y },
        predicted_location: closed,
    })
}

/// Vertex secular function `1 - s m(z) / (z - r)`.
pub fn vertex_secular(r: f64, s: f64, z: f64) -> f64 {
    1.0 - s * stieltjes(z) / (z - r)
}

/// Outlier created by vertex weight `r` and squared degree `s`: the largest
/// zero of `1 - s m(z)/(z - r)` above `max(2, r)`, i.e. `r + m(z) s = z`.
pub fn vertex_secular_root(r: f64, s: f64) -> Result<BbpPrediction> {
    if !(r >= 0.0) || !(s >= 1.0) {
        return Err(Error::domain(
            "vertex_secular_root",
            format!("requires r >= 0 and s >= 1, got r = {r}, s = {s}"),
        ));
    }
    if r == 0.0 && s == 1.0 {
        return Err(Error::domain("vertex_secular_root", "(r, s) = (0, 1) is the unperturbed point"));
    }
    // The secular function increases in z on (r, inf), so the bracket holds
    // at most one zero.
    let lo = r.max(2.0) + VERTEX_BRACKET_OFFSET;
    let hi = r + s + 2.0;
    let f = |z: f64| vertex_secular(r, s, z);
    if f(lo) >= 0.0 {
        return Err(Error::NoRoot(format!(
            "plant (r = {r}, s = {s}) is too weak to leave the bulk"
        )));
    }
    let z = bisect(f, lo, hi, RootOptions::default())?;
    let residual = r + stieltjes(z) * s - z;
    if residual.abs() > 1e-9 * z.max(1.0) {
        return Err(Error::NonConvergence {
            solver: "vertex_secular_root",
            detail: format!("identity r + m(z) s = z off by {residual}"),
        });
    }
    Ok(BbpPrediction {
        strength: PlantStrength::Vertex { r, s },
        predicted_location: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const M3: f64 = 0.381_966_011_250_105_15;
    const THREE_OVER_M3: f64 = 7.854_101_966_249_684_5;

    #[test]
    fn m_of_examples() {
        assert_eq!(m_of(2.5).unwrap(), 0.5);
        assert!((m_of(3.0).unwrap() - M3).abs() < 1e-15);
        assert!(1.0 - m_of(2.0 + 1e-10).unwrap() < 1e-4);
        assert!(m_of(2.0).is_err());
        assert!(m_of(1.0).is_err());
        assert!(m_of(f64::NAN).is_err());
    }

    #[test]
    fn m_inverse_examples() {
        assert_eq!(m_inverse(0.5).unwrap(), 2.5);
        assert!((m_inverse(M3).unwrap() - 3.0).abs() < 1e-14);
        assert!(m_inverse(1.0).is_err());
        assert!(m_inverse(0.0).is_err());
        assert!(m_inverse(1.0 - 1e-6).unwrap() > 2.0);
    }

    #[test]
    fn lambda_over_m_examples() {
        assert_eq!(lambda_over_m(2.5).unwrap(), 5.0);
        assert!((lambda_over_m(3.0).unwrap() - THREE_OVER_M3).abs() < 1e-13);
        assert!((lambda_over_m(2.0 + 1e-9).unwrap() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn degree_to_lambda_examples() {
        assert_eq!(degree_to_lambda(2.0).unwrap(), 2.0);
        assert_eq!(degree_to_lambda(5.0).unwrap(), 2.5);
        assert!((degree_to_lambda(THREE_OVER_M3).unwrap() - 3.0).abs() < 1e-13);
        assert!(degree_to_lambda(1.9).is_err());
    }

    #[test]
    fn clique_root_examples() {
        assert_eq!(clique_secular_root(2.0).unwrap().predicted_location, 2.5);
        let p = clique_secular_root(1.0 / M3).unwrap();
        assert!((p.predicted_location - 3.0).abs() < 1e-13);
        let near = clique_secular_root(1.0001).unwrap().predicted_location;
        assert!((near - 2.000_000_009_999_000_1).abs() < 1e-14);
        assert!(clique_secular_root(1.0).is_err());
    }

    #[test]
    fn vertex_root_examples() {
        let p = vertex_secular_root(0.0, THREE_OVER_M3).unwrap();
        assert!((p.predicted_location - 3.0).abs() < 1e-10);
        let p = vertex_secular_root(1.0 / M3, 1.0).unwrap();
        assert!((p.predicted_location - 3.0).abs() < 1e-10);
        // lambda - 1 = 2 m(lambda) has the closed-form solution sqrt(5).
        let p = vertex_secular_root(1.0, 2.0).unwrap();
        assert!((p.predicted_location - 5f64.sqrt()).abs() < 1e-10);
        let z = p.predicted_location;
        assert!((1.0 + m_of(z).unwrap() * 2.0 - z).abs() < 1e-10);
    }

    #[test]
    fn vertex_root_errors() {
        assert!(vertex_secular_root(0.0, 1.0).is_err());
        assert!(vertex_secular_root(-0.1, 2.0).is_err());
        assert!(vertex_secular_root(1.0, 0.5).is_err());
        assert!(matches!(vertex_secular_root(0.5, 1.0), Err(Error::NoRoot(_))));
    }
}
