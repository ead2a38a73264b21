use itelab_core::media::*;
use itelab_core::radial::*;
use itelab_core::specfun::sph_j_seq;
use itelab_core::Complex64;
use proptest::prelude::*;

fn bump(c: f64) -> RefractiveProfile {
    make_profile(ProfileFamily::Bump, 1.0, &[c]).unwrap()
}

fn a_end(p: &RefractiveProfile, l: usize, k: Complex64) -> Complex64 {
    solve_radial_end(p, l, k, 1e-12).unwrap().values().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn free_solution_is_riccati_bessel(l in 0usize..=20, kr in 0.5f64..30.0, ki in -3.0f64..3.0) {
        let p = make_profile(ProfileFamily::ConstantOne, 1.0, &[]).unwrap();
        let k = Complex64::new(kr, ki);
        let sol = solve_radial(&p, l, k, 1e-10).unwrap();
        for s in &sol.samples {
            let want = s.r * sph_j_seq(l, k * s.r)[l];
            let (a, _) = s.values();
            prop_assert!((a - want).norm() <= 1e-8 * want.norm(), "r={} a={a} want={want}", s.r);
        }
    }

    #[test]
    fn startup_radius_does_not_matter(c in -0.5f64..2.0, l in 0usize..6, kr in 1.0f64..20.0) {
        let d = startup_sensitivity(&bump(c), l, Complex64::new(kr, 0.5), 1e-11).unwrap();
        prop_assert!(d <= 1e-9, "relative change {d}");
    }

    #[test]
    fn endpoint_is_analytic_in_k(c in 0.1f64..2.0, l in 0usize..4, kr in 1.0f64..15.0, ki in -2.0f64..2.0) {
        let p = bump(c);
        let k = Complex64::new(kr, ki);
        let h = 1e-2;
        // fourth-order central differences along both axes
        let d = |dir: Complex64| {
            let f = |t: f64| a_end(&p, l, k + dir * t);
            (f(-2.0 * h) - f(-h) * 8.0 + f(h) * 8.0 - f(2.0 * h)) / (12.0 * h)
        };
        let fx = d(Complex64::new(1.0, 0.0));
        let fy = d(Complex64::new(0.0, 1.0));
        let dbar = (fx + Complex64::i() * fy) * 0.5;
        let dk = (fx - Complex64::i() * fy) * 0.5;
        prop_assert!(dbar.norm() <= 1e-6 * dk.norm(), "dbar={} dk={}", dbar.norm(), dk.norm());
    }

    #[test]
    fn liouville_form_tracks_radial_form(c in -0.5f64..2.0, l in prop::sample::select(vec![0usize, 1, 5]), kr in 0.5f64..20.0, ki in -2.0f64..2.0) {
        let p = bump(c);
        let f = liouville(&p, l).unwrap();
        let k = Complex64::new(kr, ki);
        let rs: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
        let opts = RadialOptions { r0: None, checkpoints: Some(rs.clone()) };
        let rad = solve_radial_with(&p, l, k, 1e-10, &opts).unwrap();
        let xis: Vec<f64> = rad.samples.iter().map(|s| f.xi_of_r(s.r)).collect();
        let lio = solve_liouville_at(&f, k, 1e-10, &xis).unwrap();
        let scale = rad.samples.iter().map(|s| s.values().0.norm()).fold(0.0, f64::max);
        for s in &rad.samples {
            let xi = f.xi_of_r(s.r);
            let z = lio.samples.iter().find(|t| (t.xi - xi).abs() <= 1e-12 * (1.0 + xi)).unwrap().values().0;
            let want = s.values().0 * p.n(s.r).powf(0.25);
            prop_assert!((z - want).norm() <= 1e-7 * scale, "r={} diff={}", s.r, (z - want).norm());
        }
    }
}

#[test]
fn conjugate_k_gives_conjugate_solution() {
    let p = bump(0.7);
    for (l, k) in [(0, Complex64::new(3.0, 1.0)), (2, Complex64::new(7.5, -0.4))] {
        let a = a_end(&p, l, k);
        let b = a_end(&p, l, k.conj());
        assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
    }
}

#[test]
fn rejects_bad_tolerance_and_zero_k() {
    let p = bump(1.0);
    assert!(solve_radial(&p, 0, Complex64::new(0.0, 0.0), 1e-10).is_err());
    assert!(solve_radial(&p, 0, Complex64::new(1.0, 0.0), 0.5).is_err());
}
