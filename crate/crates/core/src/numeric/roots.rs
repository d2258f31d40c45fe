use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once the bracket width is below `rel_tol * max(1, |mid|)`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Bisection on `[lo, hi]`. `f(lo)` and `f(hi)` must have opposite signs
/// (an exact zero at an endpoint is returned as is).
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "bisection bracket [{lo}, {hi}] is empty"
        )));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot(format!(
            "no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.rel_tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection that first grows the upper end (doubling the bracket width)
/// until a sign change appears or `hi` passes `cap`.
pub fn bisect_expanding<F>(mut f: F, lo: f64, hi: f64, cap: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let mut width = hi - lo;
    let mut upper = hi;
    loop {
        let f_up = f(upper);
        if f_up == 0.0 || (!f_up.is_nan() && f_up.signum() != f_lo.signum()) {
            return bisect(f, lo, upper, opts);
        }
        if upper >= cap {
            return Err(Error::NoRoot(format!(
                "no sign change on [{lo}, {upper}] after bracket expansion"
            )));
        }
        width *= 2.0;
        upper = (lo + width).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, RootOptions::default()),
            Err(Error::NoRoot(_))
        ));
    }

    #[test]
    fn expansion_reaches_far_root() {
        let r = bisect_expanding(|x| x - 1000.0, 0.0, 1.0, 1e6, RootOptions::default()).unwrap();
        assert!((r - 1000.0).abs() < 1e-8);
        assert!(bisect_expanding(|x| x - 1e7, 0.0, 1.0, 1e6, RootOptions::default()).is_err());
    }
}
