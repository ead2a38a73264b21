use itelab_core::asymlab::*;
use itelab_core::media::*;
use itelab_core::Complex64;

fn frame(c: f64, l: usize) -> LiouvilleFrame {
    liouville(&make_profile(ProfileFamily::Bump, 1.0, &[c]).unwrap(), l).unwrap()
}

#[test]
fn envelope_constant_is_stable_under_refinement() {
    let f = frame(1.0, 0);
    let grid = |n: usize| -> Vec<Complex64> {
        log_grid(5.0, 200.0, n)
            .into_iter()
            .flat_map(|x| [Complex64::new(x, 0.0), Complex64::new(x, 1.5)])
            .collect()
    };
    let coarse = validate_carlson_bounds(&f, &grid(40), 1e-11).unwrap();
    let fine = validate_carlson_bounds(&f, &grid(80), 1e-11).unwrap();
    assert!(coarse.pass() && fine.pass());
    let drift = (coarse.carlson.constant - fine.carlson.constant).abs() / fine.carlson.constant;
    assert!(drift < DRIFT_TOL, "drift {drift}");
}

#[test]
fn higher_order_bound_holds_with_one_constant() {
    let f = frame(1.0, 3);
    let ks: Vec<Complex64> = log_grid(5.0, 200.0, 60)
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    let r = validate_carlson_bounds(&f, &ks, 1e-11).unwrap();
    assert!(r.variation.constant.is_finite() && r.variation.drift.unwrap() < DRIFT_TOL);
}

#[test]
fn lemma_discrepancy_grows_with_the_gap() {
    let orders: Vec<i64> = (0..60).map(|i| 2 * i + 1).collect();
    let at = |b2: f64| {
        let r = bessel_limit_lemma(2.0, b2, 3.0, &orders).unwrap();
        r.wronskian_gaps[30]
    };
    assert!(at(2.1) < at(2.2) && at(2.2) < at(2.4));
    // both Riccati–Bessel sequences die off once l >> kB
    let r = bessel_limit_lemma(2.0, 2.2, 3.0, &(0..200).map(|i| 2 * i + 1).collect::<Vec<_>>()).unwrap();
    assert!(r.limsup < 1e-30);
}

#[test]
fn residue_deviation_shrinks_when_j_doubles() {
    let r = residue_probe(&frame(1.0, 0), &[10, 20, 40], 1e-11).unwrap();
    let dev: Vec<f64> = r.samples.iter().map(|s| s.deviation()).collect();
    assert!(dev[1] <= 0.5 * dev[0] && dev[2] <= 0.5 * dev[1], "{dev:?}");
    assert!((r.q_direct - r.q_by_parts).abs() <= 1e-9 * r.q_by_parts);
}

#[test]
fn quotient_of_distinct_media_has_balanced_zeros_and_poles() {
    let t = quotient_trace(&frame(0.5, 0), &frame(1.0, 0), 60.0, 8, 1e-10).unwrap();
    assert_eq!(t.zeros.len(), t.poles.len());
    assert_eq!(t.unpaired_zeros.len(), t.unpaired_poles.len());
    assert!(t.tail_max < 0.05);
}
