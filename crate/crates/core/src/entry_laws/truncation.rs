use serde::{Deserialize, Serialize};

use super::EntryLaw;
use crate::error::{Error, Result};
use crate::numeric::{bisect_expanding, integrate, integrate_to_infinity, QuadOptions, RootOptions};

/// Cut points `[-a, b]` keeping the truncated first moment at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationWindow {
    pub a: f64,
    pub b: f64,
    /// `∫_{-a}^{b} x dμ(x)` at the returned cuts.
    pub residual_mean: f64,
}

const TAIL_QUAD: QuadOptions = QuadOptions {
    abs_tol: 0.0,
    rel_tol: 1e-13,
    max_intervals: 4000,
};

/// Find `b` with `∫_{-a}^{b} x dμ(x) = 0` for a law with a density.
///
/// For a centered law the truncated moment equals `T₋(a) - T₊(b)` with
/// `T₊(b) = ∫_b^∞ x f(x) dx` and `T₋(a) = ∫_a^∞ x f(-x) dx`, which is
/// increasing in `b`; `b` is found by bisection on that difference.
pub fn mean_preserving_truncation(law: &dyn EntryLaw, a: f64) -> Result<TruncationWindow> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(
            "mean_preserving_truncation",
            format!("requires a finite a > 0, got {a}"),
        ));
    }
    if law.density(0.0).is_none() {
        return Err(Error::UnsupportedLaw {
            law: law.name().to_string(),
            detail: "mean-preserving truncation needs a density".into(),
        });
    }
    let f = |x: f64| law.density(x).unwrap_or(0.0);
    let left_tail = integrate_to_infinity(|y| y * f(-y), a, TAIL_QUAD).0;
    let right_tail = |b: f64| integrate_to_infinity(|x| x * f(x), b, TAIL_QUAD).0;
    let b = bisect_expanding(
        |b| left_tail - right_tail(b),
        0.0,
        a.max(1.0),
        1e6,
        RootOptions {
            rel_tol: 1e-14,
            max_iter: 300,
        },
    )?;
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    let residual_mean = integrate(|x| x * f(x), -a, b, opts).0;
    Ok(TruncationWindow { a, b, residual_mean })
}
