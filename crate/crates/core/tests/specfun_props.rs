use itelab_core::specfun::*;
use itelab_core::Complex64;
use proptest::prelude::*;

/// Magnitude of the two products the Wronskian residual subtracts, and of
/// the right-hand side.
fn wronskian_scale(n: usize, z: Complex64) -> f64 {
    let j = sph_j_seq(n + 1, z);
    let y = sph_y_seq(n + 1, z);
    let rhs = (2 * n + 1) as f64 / z.norm().powi(3);
    (j[n + 1] * y[n - 1]).norm().max((j[n - 1] * y[n + 1]).norm()).max(rhs)
}

fn arg() -> impl Strategy<Value = Complex64> {
    (0.5f64..100.0, -1.0f64..1.0).prop_map(|(m, t)| Complex64::from_polar(m, t * 0.45 * std::f64::consts::PI))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wronskian_residual_is_small(n in 1usize..=50, z in arg()) {
        let r = wronskian_check(n, z).unwrap();
        let scale = wronskian_scale(n, z);
        prop_assert!(r.norm() <= 1e-10 * scale, "n={n} z={z} r={}", r.norm());
    }

    #[test]
    fn one_recurrence_step_matches_direct_values(l in 1usize..=100, z in arg()) {
        let j = sph_j_seq(l + 1, z);
        let y = sph_y_seq(l + 1, z);
        let f = (2 * l + 1) as f64 / z;
        // cancellation in the j step grows like (2l+1)/|z| times the larger term
        let jn = j[l] * f - j[l - 1];
        let jscale = (j[l] * f).norm().max(j[l - 1].norm());
        prop_assert!((jn - j[l + 1]).norm() <= 1e-13 * jscale + 1e-9 * j[l + 1].norm());
        let yn = y[l] * f - y[l - 1];
        prop_assert!((yn - y[l + 1]).norm() <= 1e-9 * y[l + 1].norm());
    }

    #[test]
    fn riccati_form_matches_bessel(l in 0usize..=30, xi in 0.1f64..3.0, kr in 0.5f64..60.0, ki in -3.0f64..3.0) {
        let k = Complex64::new(kr, ki);
        let (u, du) = riccati_u(l, xi, k).unwrap();
        let p = sph_bessel(l, k * xi).unwrap();
        let want = k * xi * p.j_value / k.powi(l as i32 + 1);
        prop_assert!((u - want).norm() <= 1e-11 * want.norm());
        // d/dxi [xi j_l(k xi)] = xi k j_l' + j_l with j_l' = j_{l-1} - (l+1)/z j_l (l >= 1)
        if l >= 1 {
            let q = sph_bessel(l - 1, k * xi).unwrap();
            let z = k * xi;
            let dj = q.j_value - p.j_value * ((l + 1) as f64) / z;
            let want_d = (z * dj + p.j_value) / k.powi(l as i32);
            prop_assert!((du - want_d).norm() <= 1e-10 * (want_d.norm() + want.norm() * k.norm()));
        }
    }

    #[test]
    fn kernels_are_normalised_on_the_diagonal(l in 0usize..=20, wr in 0.5f64..100.0, wi in -2.0f64..2.0) {
        let w = Complex64::new(wr, wi);
        let (phi, psi) = phi_psi_kernels(w, w, l).unwrap();
        prop_assert!(phi.norm() <= 1e-12 * (1.0 + w.norm()));
        prop_assert!((psi - 1.0).norm() <= 1e-9);
    }

    #[test]
    fn legendre_is_bounded_on_the_interval(l in 0usize..=200, t in -1.0f64..=1.0) {
        prop_assert!(legendre(l, t).abs() <= 1.0 + 1e-12);
    }
}

#[test]
fn free_envelope_constant_is_uniform_in_k() {
    // |k^{l+1} u_l - sin(k xi - l pi/2)| |k xi| e^{-|Im k| xi} stays below one
    // constant per l; its large-k limit is l(l+1)/2
    let xi = 1.0;
    for l in 0..=10usize {
        let mut worst: f64 = 0.0;
        for i in 0..400 {
            let kr = 5.0 * 100f64.powf(i as f64 / 399.0);
            for ki in [0.0, 1.0, -2.0] {
                let k = Complex64::new(kr, ki);
                let (u, _) = riccati_u(l, xi, k).unwrap();
                let lead = (k * xi - l as f64 * std::f64::consts::FRAC_PI_2).sin();
                let e = (u * k.powi(l as i32 + 1) - lead).norm() * (k * xi).norm() / (ki.abs() * xi).exp();
                worst = worst.max(e);
            }
        }
        let bound = (l * (l + 1)) as f64 / 2.0;
        assert!(worst <= 3.0 * bound + 1e-9, "l={l} worst={worst}");
    }
}

#[test]
fn high_orders_refuse_past_the_limit() {
    assert!(sph_bessel(L_MAX + 1, Complex64::new(1.0, 0.0)).is_err());
}
