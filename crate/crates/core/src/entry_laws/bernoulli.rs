use crate::error::{Error, Result};

/// `Λ_p(θ) = log E exp(θ(ζ - p))` for `ζ ~ Bernoulli(p)`.
pub fn bernoulli_log_mgf(p: f64, theta: f64) -> f64 {
    if theta > 0.0 {
        // θ(1-p) + log(p + (1-p) e^{-θ}) stays finite for large θ.
        theta * (1.0 - p) + (p + (1.0 - p) * (-theta).exp()).ln()
    } else {
        (p * theta.exp_m1()).ln_1p() - theta * p
    }
}

/// Legendre transform `Λ_p*(x)` of [`bernoulli_log_mgf`], finite on `(-p, 1-p)`.
pub fn bernoulli_rate(p: f64, x: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("bernoulli_rate", format!("requires p in (0, 1), got {p}")));
    }
    if !(x > -p && x < 1.0 - p) {
        return Err(Error::domain(
            "bernoulli_rate",
            format!("requires x in (-p, 1-p) = ({}, {}), got {x}", -p, 1.0 - p),
        ));
    }
    let q = x + p;
    Ok(q * (q / p).ln() + (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::golden_max;

    fn numeric_rate(p: f64, x: f64) -> f64 {
        golden_max(|t| t * x - bernoulli_log_mgf(p, t), -60.0, 60.0, 1e-13).value
    }

    #[test]
    fn log_mgf_examples() {
        assert_eq!(bernoulli_log_mgf(0.3, 0.0), 0.0);
        assert!((bernoulli_log_mgf(0.01, 1.0) - 0.007_036_863_236_176_549_8).abs() < 1e-15);
        // Both branches stay finite far out.
        assert!((bernoulli_log_mgf(0.01, 800.0) - (800.0 * 0.99 + 0.01f64.ln())).abs() < 1e-9);
        assert!((bernoulli_log_mgf(0.01, -800.0) - 8.0 - 0.99f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn log_mgf_quadratic_bound() {
        for &p in &[0.001f64, 0.01, 0.1, 0.3, 0.49] {
            let c = (1.0 - 2.0 * p) / (4.0 * ((1.0 - p) / p).ln());
            for i in -200..=200 {
                let theta = 0.1 * i as f64;
                assert!(bernoulli_log_mgf(p, theta) <= c * theta * theta + 1e-12, "p {p} theta {theta}");
            }
        }
    }

    #[test]
    fn rate_examples() {
        assert_eq!(bernoulli_rate(0.2, 0.0).unwrap(), 0.0);
        let r = bernoulli_rate(0.01, 0.05).unwrap();
        assert!((r - 0.058_790_004_360_972_43).abs() < 1e-15);
        assert!((r - numeric_rate(0.01, 0.05)).abs() < 1e-8);
        assert!(bernoulli_rate(0.01, -0.02).is_err());
        assert!(bernoulli_rate(0.01, 0.99).is_err());
    }

    #[test]
    fn rate_is_legendre_transform() {
        for &p in &[0.01, 0.1, 0.4] {
            for i in 1..20 {
                let x = -p + (1.0 - 1e-3) * i as f64 / 20.0;
                let closed = bernoulli_rate(p, x).unwrap();
                assert!((closed - numeric_rate(p, x)).abs() < 1e-8, "p {p} x {x}");
            }
        }
    }

    #[test]
    fn rate_convex_with_single_zero() {
        let p = 0.05;
        let xs: Vec<f64> = (1..400).map(|i| -p + i as f64 * (1.0 / 400.0)).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| bernoulli_rate(p, x).unwrap()).collect();
        for w in vals.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
        }
        for (&x, &v) in xs.iter().zip(&vals) {
            if x.abs() > 1e-9 {
                assert!(v > 0.0, "rate vanishes at {x}");
            }
        }
    }

    #[test]
    fn small_p_asymptotics() {
        let (p, c) = (1e-4, 5.0);
        let scaled = bernoulli_rate(p, c * p).unwrap() / p;
        let limit = (c + 1.0) * (c + 1.0f64).ln() - c;
        assert!((scaled / limit - 1.0).abs() < 0.02);
    }
}
