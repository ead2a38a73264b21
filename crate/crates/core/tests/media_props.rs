use itelab_core::media::*;
use proptest::prelude::*;

fn bump(c: f64) -> RefractiveProfile {
    make_profile(ProfileFamily::Bump, 1.0, &[c]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn xi_map_round_trips(c in -0.6f64..3.0, l in 0usize..4, rs in prop::collection::vec(0.0f64..1.2, 40)) {
        let f = liouville(&bump(c), l).unwrap();
        for r in rs {
            let back = f.r_of_xi(f.xi_of_r(r));
            prop_assert!((back - r).abs() <= 1e-10, "r={r} back={back}");
        }
    }

    #[test]
    fn boundary_term_two_ways(c in -0.6f64..3.0) {
        let f = liouville(&bump(c), 0).unwrap();
        let direct = f.big_q(f.b()).unwrap();
        let parts = f.big_q_by_parts().unwrap();
        prop_assert!((direct - parts).abs() <= 1e-9 * parts.abs().max(1e-300), "{direct} vs {parts}");
        prop_assert!(parts > 0.0);
    }

    #[test]
    fn potentials_differ_by_the_centrifugal_term(c in -0.6f64..3.0, l in 1usize..6, t in 0.05f64..1.0) {
        let f = liouville(&bump(c), l).unwrap();
        let xi = t * f.b();
        let lf = (l * (l + 1)) as f64;
        let d = f.p(xi) - f.q(xi) - lf / (xi * xi);
        prop_assert!(d.abs() <= 1e-10 * (1.0 + f.p(xi).abs()), "residual {d}");
    }

    #[test]
    fn q_stays_bounded_at_the_origin(c in -0.6f64..3.0, l in 1usize..6) {
        let f = liouville(&bump(c), l).unwrap();
        let vals: Vec<f64> = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1].iter().map(|s| f.q(s * f.b())).collect();
        // q(xi) = q0 + O(xi^2): successive values settle toward the origin
        let d_small = (vals[0] - vals[1]).abs();
        let d_large = (vals[3] - vals[4]).abs();
        prop_assert!(vals.iter().all(|v| v.is_finite()));
        prop_assert!(d_small <= 1e-2 * d_large + 1e-8, "{vals:?}");
    }
}

#[test]
fn constant_profile_has_zero_boundary_term() {
    let p = make_profile(ProfileFamily::ConstantOne, 2.0, &[]).unwrap();
    let f = liouville(&p, 0).unwrap();
    assert_eq!(f.b(), 2.0);
    assert_eq!(f.big_q(2.0).unwrap(), 0.0);
    assert_eq!(f.big_q_by_parts().unwrap(), 0.0);
}

#[test]
fn rejects_profiles_that_do_not_match_the_exterior() {
    assert!(make_profile(ProfileFamily::Bump, 1.0, &[-1.5]).is_err());
    assert!(make_profile(ProfileFamily::SumOfBumps, 1.0, &[0.3, 1.2]).is_err());
    assert!(make_profile(ProfileFamily::ConstantOne, 0.0, &[]).is_err());
}
