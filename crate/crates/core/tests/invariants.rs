use proptest::prelude::*;

use ssalab_core::bdecomp::ProductCF;
use ssalab_core::escape::{Gauge, SmallBallCdf};
use ssalab_core::levy_lil::{brownian_hitting, exit_time_cdf_1d, BrownianConfig};
use ssalab_core::seeds;
use ssalab_core::sequences::{build_w_path, build_y_path, lamperti, BuildOptions, SequenceParams};
use ssalab_core::{labels, IncrementLaw, LawSpec};

fn law() -> impl Strategy<Value = IncrementLaw> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|c| IncrementLaw::point_mass(vec![c]).unwrap()),
        (0.05f64..0.95).prop_map(|l| IncrementLaw::bernoulli(l, vec![1.0]).unwrap()),
        (0.2f64..5.0).prop_map(|r| IncrementLaw::exponential(vec![r]).unwrap()),
        (0.1f64..3.0).prop_map(|h| IncrementLaw::uniform(vec![-h], vec![h]).unwrap()),
        Just(IncrementLaw::standard_gaussian(1).unwrap()),
        (0.3f64..0.7).prop_map(|a| IncrementLaw::positive_stable(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn increments_satisfy_both_recursions(law in law(), a in 1.2f64..4.0, seed in any::<u64>()) {
        let params = SequenceParams::new(a, 1, -5, 20).unwrap();
        let w = build_w_path(params, &law, &BuildOptions::default(), seed).unwrap();
        let y = build_y_path(params, &law, &BuildOptions::default(), seed).unwrap();
        for n in -4..=20i64 {
            let dw = w.value(n)[0] - w.value(n - 1)[0] - a.powi(n as i32) * w.increment(n)[0];
            prop_assert!(dw.abs() <= 1e-12 * (1.0 + w.value(n)[0].abs()));
            let dy = y.value(n)[0] - y.value(n - 1)[0] / a - y.increment(n)[0];
            prop_assert!(dy.abs() <= 1e-12 * (1.0 + y.value(n)[0].abs()));
            let lam = a.powi(n as i32) * y.value(n)[0];
            prop_assert!((w.value(n)[0] - lam).abs() <= 1e-12 * (1.0 + lam.abs()));
        }
        let back = lamperti(&lamperti(&w).unwrap()).unwrap();
        for (x, z) in back.values.iter().zip(&w.values) {
            prop_assert!((x - z).abs() <= 1e-12 * (1.0 + z.abs()));
        }
    }

    #[test]
    fn same_seed_same_path(law in law(), seed in any::<u64>()) {
        let params = SequenceParams::new(2.0, 1, 0, 10).unwrap();
        let a = build_w_path(params, &law, &BuildOptions::default(), seed).unwrap();
        let b = build_w_path(params, &law, &BuildOptions::default(), seed).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn cf_bounds_and_symmetry(law in law(), z in -20.0f64..20.0) {
        prop_assert!((law.cf(&[0.0]) - 1.0).norm() < 1e-15);
        let (c, cn) = (law.cf(&[z]), law.cf(&[-z]));
        prop_assert!(c.norm() <= 1.0 + 1e-12);
        prop_assert!((c - cn.conj()).norm() < 1e-12);
    }

    #[test]
    fn product_fixed_point(law in law(), b in 0.1f64..0.9, z in -6.0f64..6.0) {
        let p = ProductCF::from_law(&law, b, 1e-12, 200_000).unwrap();
        let lhs = p.mu_hat(&[z]).unwrap();
        let rhs = p.mu_hat(&[b * z]).unwrap().value * p.rho(&[z]);
        prop_assert!((lhs.value - rhs).norm() <= 1e-10);
        prop_assert!(lhs.value.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn law_spec_round_trips(law in law()) {
        let text = serde_json::to_string(law.spec()).unwrap();
        let back: LawSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, law.spec());
        let mut cfg = ssalab_core::config::ExperimentConfig::from_toml("schema = 1\nexperiment = \"kw\"\nseed = 1\n[kw]\na = 2.0\n").unwrap();
        cfg.law = Some(law.spec().clone());
        let again = ssalab_core::config::ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(again.law.as_ref(), Some(law.spec()));
    }

    #[test]
    fn seed_derivation_separates_labels(master in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(seeds::derive(master, &labels!["path", i]), seeds::derive(master, &labels!["path", j]));
        prop_assert_eq!(seeds::derive(master, &labels!["path", i]), seeds::derive(master, &labels!["path", i]));
    }

    #[test]
    fn gauges_are_nonincreasing(p in 0.0f64..2.0, q in 0.0f64..3.0, c in 0.1f64..10.0, n in 2.0f64..1e6) {
        prop_assume!(p > 0.0 || q > 0.0);
        let g = Gauge::power_log(p, q).unwrap().scaled(c);
        prop_assert!(g.eval(n) > 0.0);
        prop_assert!(g.eval(2.0 * n) <= g.eval(n));
    }

    #[test]
    fn small_ball_cdfs_are_monotone(beta in 0.1f64..4.0, r in 1e-6f64..0.5) {
        for f in [SmallBallCdf::power(beta), SmallBallCdf::exp_inverse(), SmallBallCdf::hitting_form(3)] {
            let (x, y) = (f.eval(r), f.eval(1.5 * r));
            prop_assert!((0.0..=1.0).contains(&x) && x <= y);
        }
    }

    #[test]
    fn exit_cdf_is_a_cdf(t in 0.01f64..20.0) {
        let (x, y) = (exit_time_cdf_1d(t), exit_time_cdf_1d(1.1 * t));
        prop_assert!((0.0..=1.0).contains(&x) && x <= y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hitting_times_monotone_in_radius(d in 1usize..4, seed in any::<u64>()) {
        let s = brownian_hitting(&BrownianConfig::new(d, 50, 1e-2).unwrap(), &[0.5, 1.0, 2.0], seed).unwrap();
        prop_assert!(s.check().is_ok());
        for row in &s.hitting {
            prop_assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
