use itelab_core::detroot::*;
use itelab_core::media::*;
use itelab_core::Complex64;
use proptest::prelude::*;

fn bump(c: f64) -> RefractiveProfile {
    make_profile(ProfileFamily::Bump, 1.0, &[c]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn real_media_give_conjugate_symmetry(c1 in -0.5f64..2.0, c2 in -0.5f64..2.0, l in 0usize..4, kr in 0.5f64..30.0, ki in -4.0f64..4.0) {
        let (pa, pb) = (bump(c1), bump(c2));
        let k = Complex64::new(kr, ki);
        let d = eval_determinant(&pa, &pb, l, k, 1e-11).unwrap().d_value();
        let e = eval_determinant(&pa, &pb, l, k.conj(), 1e-11).unwrap().d_value();
        prop_assert!((d - e.conj()).norm() <= 1e-12 * d.norm().max(1e-300));
    }

    #[test]
    fn swapping_profiles_flips_the_sign(c1 in -0.5f64..2.0, c2 in -0.5f64..2.0, l in 0usize..4, kr in 0.5f64..30.0, ki in -4.0f64..4.0) {
        let (pa, pb) = (bump(c1), bump(c2));
        let k = Complex64::new(kr, ki);
        let d = eval_determinant(&pa, &pb, l, k, 1e-11).unwrap();
        let e = eval_determinant(&pb, &pa, l, k, 1e-11).unwrap();
        prop_assert_eq!(d.value, -e.value);
        prop_assert_eq!(d.recompute(), (d.value, d.log_scale));
    }

    #[test]
    fn counted_zeros_are_all_refined(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, roots in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..6)) {
        // polynomial with known roots plus a nonvanishing exponential factor
        let rs: Vec<Complex64> = roots.iter().map(|(a, b)| Complex64::new(*a, *b)).collect();
        let rr = rs.clone();
        let f = FnSampler(move |k: Complex64| {
            rr.iter().fold((k * 0.3 + Complex64::new(c0, c1)).exp(), |acc, r| acc * (k - r))
        });
        let rect = Rect::new(-1.5, 1.5, -1.5, 1.5).unwrap();
        match find_zeros(&f, &rect) {
            Ok(z) => {
                prop_assert_eq!(z.count_by_argument_principle as usize, z.total_multiplicity());
                let inside = rs.iter().filter(|r| rect.contains(**r)).count();
                prop_assert_eq!(inside, z.total_multiplicity());
            }
            // a root within the shift tolerance of the edge is reported, not hidden
            Err(e) => {
                let on_edge = matches!(e, itelab_core::Error::BoundaryZero { .. });
                prop_assert!(on_edge, "unexpected error {e:?}");
            }
        }
    }
}

#[test]
fn determinant_zeros_match_the_count() {
    let (pa, pb) = (bump(0.5), bump(1.0));
    let f = DeterminantSampler {
        profile_a: &pa,
        profile_b: &pb,
        l: 1,
        tol: 1e-10,
    };
    let z = find_zeros(&f, &Rect::new(0.5, 20.0, -4.0, 4.0).unwrap()).unwrap();
    assert!(!z.zeros.is_empty());
    assert_eq!(z.count_by_argument_principle as usize, z.total_multiplicity());
    assert!(z.refinement_residuals().iter().all(|r| *r < 1e-9));
    // zeros come in conjugate pairs
    for w in &z.zeros {
        assert!(z.zeros.iter().any(|v| (v.k - w.k.conj()).norm() < 1e-7));
    }
}

#[test]
fn transmission_zeros_are_denser_than_either_factor() {
    let (pa, pb) = (bump(0.5), bump(1.0));
    let rect = Rect::new(0.5, 31.0, -7.0, 7.0).unwrap();
    let radii: Vec<f64> = (0..=10).map(|i| 10.0 + 2.0 * i as f64).collect();
    let fd = DeterminantSampler {
        profile_a: &pa,
        profile_b: &pb,
        l: 0,
        tol: 1e-10,
    };
    let fa = RadialEndpointSampler {
        profile: &pa,
        l: 0,
        tol: 1e-10,
    };
    let fb = RadialEndpointSampler {
        profile: &pb,
        l: 0,
        tol: 1e-10,
    };
    let dens = |s: &dyn Sampler| {
        density_estimate(&find_zeros(s, &rect).unwrap(), &radii, 0.5)
            .unwrap()
            .density
    };
    let (dd, da, db) = (dens(&fd), dens(&fa), dens(&fb));
    assert!(dd > da && dd > db, "D {dd} a {da} b {db}");
}

#[test]
fn growth_types_add() {
    let (pa, pb) = (bump(0.5), bump(1.0));
    let t = |s: &dyn Sampler| exponential_type(s, true, 5.0, 200.0, 40).unwrap().tau;
    let td = t(&DeterminantSampler {
        profile_a: &pa,
        profile_b: &pb,
        l: 0,
        tol: 1e-10,
    });
    let ta = t(&RadialEndpointSampler {
        profile: &pa,
        l: 0,
        tol: 1e-10,
    });
    let tb = t(&RadialEndpointSampler {
        profile: &pb,
        l: 0,
        tol: 1e-10,
    });
    assert!((td - (ta + tb)).abs() <= 0.07 * td, "{td} vs {ta} + {tb}");
}
