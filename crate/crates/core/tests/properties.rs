use proptest::prelude::*;

use robin_spectral::bessel::{bessel_ik, BesselOrder};
use robin_spectral::config::RunConfig;
use robin_spectral::domain::{DomainSpec, RobinProblem};
use robin_spectral::shape::{hadamard_derivative, BoundaryField};
use robin_spectral::solver::{first_eigenpair, SolverConfig};
use robin_spectral::suite::{eq28_bound, pinch_test_quotient};
use robin_spectral::table::format_float;

fn cfg() -> SolverConfig {
    SolverConfig::with_tolerance(1e-12)
}

fn lambda1(domain: DomainSpec, alpha: f64) -> f64 {
    first_eigenpair(&RobinProblem::new(domain, alpha).unwrap(), &cfg()).unwrap().lambda
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian(nu in 0.0..5.0f64, x in 0.1..50.0f64) {
        let v = bessel_ik(BesselOrder::new(nu).unwrap(), x).unwrap();
        let w = v.i * v.k_prime - v.i_prime * v.k;
        prop_assert!((w * x + 1.0).abs() <= 1e-10, "nu {nu} x {x}: x·W = {}", w * x);
    }

    #[test]
    fn csv_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn eq28_vanishes_on_balls(dim in 2usize..=4, r in 0.1..5.0f64) {
        let ball = DomainSpec::ball(dim, r).unwrap();
        prop_assert!(eq28_bound(&ball, r, 0.0).abs() <= 1e-12 * r.powi(-2));
    }

    #[test]
    fn shift_lowers_eq28(r1 in 0.05..0.95f64, shift in 0.01..5.0f64) {
        let a = DomainSpec::annulus_with_volume(2, r1, std::f64::consts::PI).unwrap();
        let centred = eq28_bound(&a, 1.0, 0.0);
        prop_assert!(centred <= 0.0);
        prop_assert!(eq28_bound(&a, 1.0, shift) < centred);
    }

    #[test]
    fn pair_fields_preserve_volume(w in -10.0..10.0f64, r1 in 0.1..3.0f64, t in 0.1..3.0f64) {
        let f = BoundaryField::volume_preserving(w, r1, r1 + t);
        prop_assert!(f.flux(r1, r1 + t).abs() <= 1e-12 * (w.abs() * (r1 + t)).max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lambda1_below_negativity_bound(
        ball in any::<bool>(), r1 in 0.3..2.0f64, t in 0.2..3.0f64, alpha in 0.1..10.0f64,
    ) {
        let domain = if ball { DomainSpec::ball(2, r1 + t) } else { DomainSpec::annulus(2, r1, r1 + t) }.unwrap();
        let p = RobinProblem::new(domain, alpha).unwrap();
        let l = first_eigenpair(&p, &cfg()).unwrap().lambda;
        prop_assert!(l < p.negativity_bound(), "{l} vs {}", p.negativity_bound());
    }

    #[test]
    fn lambda1_increases_with_outer_radius(
        r1 in 0.3..2.0f64, t in 0.2..3.0f64, dt in 0.05..1.0f64, alpha in 0.1..10.0f64,
    ) {
        let a = lambda1(DomainSpec::annulus(2, r1, r1 + t).unwrap(), alpha);
        let b = lambda1(DomainSpec::annulus(2, r1, r1 + t + dt).unwrap(), alpha);
        prop_assert!(a < b, "{a} !< {b}");
    }

    #[test]
    fn outer_hadamard_derivative_positive(r1 in 0.3..2.0f64, t in 0.2..3.0f64, alpha in 0.1..10.0f64) {
        let p = RobinProblem::new(DomainSpec::annulus(2, r1, r1 + t).unwrap(), alpha).unwrap();
        let pair = first_eigenpair(&p, &cfg()).unwrap();
        prop_assert!(hadamard_derivative(&pair, &BoundaryField::OuterNormal).unwrap() > 0.0);
    }

    #[test]
    fn rayleigh_quotient_equals_lambda(
        ball in any::<bool>(), dim in 2usize..=3, r1 in 0.3..2.0f64, t in 0.2..3.0f64, alpha in 0.1..10.0f64,
    ) {
        let domain = if ball { DomainSpec::ball(dim, r1 + t) } else { DomainSpec::annulus(dim, r1, r1 + t) }.unwrap();
        let pair = first_eigenpair(&RobinProblem::new(domain, alpha).unwrap(), &cfg()).unwrap();
        let q = pair.rayleigh_quotient();
        prop_assert!((q - pair.lambda).abs() <= 1e-8 * pair.lambda.abs().max(1.0), "{q} vs {}", pair.lambda);
    }

    #[test]
    fn pinch_quotient_bounds_annulus(eps in 0.005..0.2f64, alpha in 0.2..5.0f64) {
        let ball = first_eigenpair(&RobinProblem::new(DomainSpec::ball(2, 1.0).unwrap(), alpha).unwrap(), &cfg()).unwrap();
        let r_prime = (1.0 + eps * eps).sqrt();
        let annulus = lambda1(DomainSpec::annulus(2, eps, r_prime).unwrap(), alpha);
        let q = pinch_test_quotient(&ball, eps, r_prime);
        prop_assert!(q >= annulus, "{q} < {annulus}");
    }

    #[test]
    fn config_round_trips(
        tol in 1e-14..1e-6f64, scan in 2usize..2000, alpha in 0.01..100.0f64, eps in 0.001..0.5f64,
    ) {
        let c = RunConfig {
            tol,
            scan_points: scan,
            pinch_alpha: alpha,
            pinch_epsilons: vec![eps, eps * 1.5],
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }
}
