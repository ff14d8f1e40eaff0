use bose2d::lower_bound::{k_factor, SoftPotential};
use bose2d::suites::{random_dyson_case, rng, run_dyson_case};
use bose2d::{solve_radial, PotentialSpec, RadialPotential, Weight};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn moments_are_additive(h in 0.01f64..100.0, r0 in 0.1f64..5.0, t in 0.05f64..0.95) {
        let v = RadialPotential::square_well(h, r0).unwrap();
        let mid = t * r0;
        let whole = v.radial_moment(Weight::One, 0.0, r0).unwrap();
        let parts = v.radial_moment(Weight::One, 0.0, mid).unwrap() + v.radial_moment(Weight::One, mid, r0).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs());
    }

    #[test]
    fn hard_disc_length_is_radius(r in 0.01f64..100.0) {
        let a = solve_radial(&RadialPotential::hard_disc(r).unwrap(), 1.0, 2).unwrap().a();
        prop_assert!((a / r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn length_grows_with_height(h in 0.5f64..50.0, k in 1.1f64..4.0) {
        let a1 = solve_radial(&RadialPotential::square_well(h, 1.0).unwrap(), 1.0, 2).unwrap().a();
        let a2 = solve_radial(&RadialPotential::square_well(h * k, 1.0).unwrap(), 1.0, 2).unwrap().a();
        prop_assert!(a1 < a2 && a2 < 1.0);
    }

    #[test]
    fn soft_potential_normalized(r0 in 0.1f64..3.0, fa in 0.01f64..1.0, fr in 1.01f64..30.0) {
        let a = r0 * fa;
        let u = SoftPotential::new(r0, r0 * fr, a).unwrap().to_potential().unwrap();
        let m = u.radial_moment(Weight::Log { a }, 0.0, r0 * fr).unwrap();
        prop_assert!((m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn k_decreasing(eps in 0.05f64..0.95, s in 0.0f64..0.45, q in 1e-7f64..1e-4, n in 2u32..60) {
        let nu = 2.0 * (100.0 + 9900.0 * q) / eps;
        let k1 = k_factor(eps, s, nu, q, n as f64);
        let k2 = k_factor(eps, s, nu, q, n as f64 + 1.0);
        prop_assert!(k2 < k1);
    }

    #[test]
    fn dyson_slack_nonnegative(seed in 0u64..1000) {
        let case = random_dyson_case(&mut rng(seed));
        let rep = run_dyson_case(&case, 1.0, 16).unwrap();
        prop_assert!(rep.min_slack >= -1e-8);
    }

    #[test]
    fn potential_spec_roundtrip(h in 0.01f64..100.0, r in 0.1f64..10.0) {
        let spec = PotentialSpec::SquareWell { height: h, range: r };
        let text = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(text.parse::<PotentialSpec>().unwrap(), spec);
    }
}
