use std::sync::OnceLock;

use proptest::prelude::*;
use sparse_ldp::entry_laws::{make_law, LawSpec};
use sparse_ldp::experiments::{lambda_grid, Num};
use sparse_ldp::legendre::{build_transform, LegendreTransform};
use sparse_ldp::matrix_lab::localization_profile;
use sparse_ldp::rate_functions::{clique_term, rate_point, Regime};
use sparse_ldp::rng::derive_seed;
use sparse_ldp::semicircle::{
    clique_secular_root, degree_to_lambda, lambda_over_m, m_inverse, m_of, vertex_secular_root,
};

fn gaussian() -> &'static LegendreTransform {
    static T: OnceLock<LegendreTransform> = OnceLock::new();
    T.get_or_init(|| build_transform(make_law(&LawSpec::named("gaussian")).unwrap()).unwrap())
}

fn rademacher() -> &'static LegendreTransform {
    static T: OnceLock<LegendreTransform> = OnceLock::new();
    T.get_or_init(|| build_transform(make_law(&LawSpec::named("rademacher")).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn stieltjes_identities(lambda in 2.0001f64..1e4) {
        let m = m_of(lambda).unwrap();
        prop_assert!(m > 0.0 && m < 1.0);
        prop_assert!((m * m - lambda * m + 1.0).abs() < 1e-12 * lambda);
        prop_assert!((m_inverse(m).unwrap() - lambda).abs() < 1e-10 * lambda);
        prop_assert!((lambda_over_m(lambda).unwrap() * m - lambda).abs() < 1e-10 * lambda);
        let d = lambda_over_m(lambda).unwrap();
        prop_assert!((degree_to_lambda(d).unwrap() - lambda).abs() < 1e-8 * lambda);
    }

    #[test]
    fn stieltjes_is_decreasing(a in 2.001f64..50.0, gap in 1e-3f64..10.0) {
        prop_assert!(m_of(a + gap).unwrap() < m_of(a).unwrap());
    }

    #[test]
    fn clique_root_inverts_m(y in 1.0001f64..100.0) {
        let z = clique_secular_root(y).unwrap().predicted_location;
        prop_assert!((y * m_of(z).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vertex_root_solves_identity(r in 0.0f64..6.0, s in 1.01f64..40.0) {
        if let Ok(pred) = vertex_secular_root(r, s) {
            let z = pred.predicted_location;
            prop_assert!(z > r.max(2.0));
            prop_assert!((r + m_of(z).unwrap() * s - z).abs() < 1e-8 * z);
        }
    }

    #[test]
    fn h_is_nonnegative_and_convex(x in 0.05f64..12.0, dx in 0.01f64..2.0) {
        for tr in [gaussian(), rademacher()] {
            let (a, b, c) = (tr.h_l(x).unwrap(), tr.h_l(x + dx).unwrap(), tr.h_l(x + 2.0 * dx).unwrap());
            prop_assert!(a >= 0.0 && b >= 0.0 && c >= 0.0);
            prop_assert!(a + c - 2.0 * b >= -1e-8 * (1.0 + b), "{a} {b} {c}");
        }
    }

    #[test]
    fn h_vanishes_only_at_one(x in 0.05f64..12.0) {
        prop_assume!((x - 1.0).abs() > 0.02);
        prop_assert!(gaussian().h_l(x).unwrap() > 0.0);
        prop_assert!(rademacher().h_l(x).unwrap() > 0.0);
    }

    #[test]
    fn rate_is_the_smaller_branch(lambda in 2.05f64..8.0) {
        let p = rate_point(gaussian(), 2.0, 2.0, lambda).unwrap();
        prop_assert!((p.i - p.i_hat.min(p.clique)).abs() <= 1e-10 * p.i);
        if p.regime == Regime::Clique {
            prop_assert!(p.clique < p.i_hat);
        }
        prop_assert_eq!(clique_term(0.0, lambda).unwrap(), f64::INFINITY);
    }

    #[test]
    fn grid_is_increasing_with_exact_ends(from in 2.01f64..5.0, span in 0.1f64..10.0, points in 2usize..300) {
        let g = lambda_grid(from, from + span, points).unwrap();
        prop_assert_eq!(g.len(), points);
        prop_assert_eq!(g[0], from);
        prop_assert_eq!(*g.last().unwrap(), from + span);
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn num_round_trips_through_json(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        let json = serde_json::to_string(&Num(x)).unwrap();
        let back: Num = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, Num(x));
        prop_assert!(x.is_nan() || back.0.to_bits() == bits);
    }

    #[test]
    fn derived_seeds_differ(master in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(derive_seed(master, i), derive_seed(master, j));
        prop_assert_eq!(derive_seed(master, i), derive_seed(master, i));
    }

    #[test]
    fn localization_mass_is_monotone(raw in prop::collection::vec(-1.0f64..1.0, 2..60)) {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let v: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let profile = localization_profile(&v, &[0.0, 0.1, 0.3, 0.5, 0.9]).unwrap();
        prop_assert!(profile.windows(2).all(|w| w[1].mass <= w[0].mass && w[1].count <= w[0].count));
        prop_assert!(profile[0].mass <= 1.0 + 1e-12);
    }
}
