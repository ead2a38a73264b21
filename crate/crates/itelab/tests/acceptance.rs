//! Acceptance criteria. Prints one PASS/FAIL line per criterion with the
//! measured quantity, its pinned tolerance and the runtime against its
//! budget; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itelab::config::{DensityOptions, FarfieldOptions, KWindow};
use itelab::{run, Command, ExperimentConfig, ProfileSpec};
use itelab_core::asymlab::{
    log_grid, quotient_trace, residue_probe, validate_carlson_bounds, validate_classical_asymptotics,
};
use itelab_core::detroot::{exponential_type, DeterminantSampler};
use itelab_core::media::{liouville, make_profile, ProfileFamily, RefractiveProfile};
use itelab_core::radial::{solve_liouville_at, solve_radial, solve_radial_with, RadialOptions};
use itelab_core::specfun::{sph_j_seq, sph_y_seq, wronskian_check};
use itelab_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Criterion = (&'static str, Duration, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn bump(c: f64) -> RefractiveProfile {
    make_profile(ProfileFamily::Bump, 1.0, &[c]).unwrap()
}

fn free() -> RefractiveProfile {
    make_profile(ProfileFamily::ConstantOne, 1.0, &[]).unwrap()
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn closed_form_oracle() -> Verdict {
    let p = free();
    let mut worst = 0.0f64;
    for k in [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.5, 0.0),
        Complex64::new(10.0, 0.0),
        Complex64::new(50.0, 3.0),
    ] {
        for l in 0..=20 {
            let sol = solve_radial(&p, l, k, 1e-10).unwrap();
            for s in &sol.samples {
                let want = s.r * sph_j_seq(l, k * s.r)[l];
                worst = worst.max((s.values().0 - want).norm() / want.norm());
            }
        }
    }
    verdict(worst <= 1e-8, format!("max relative error {worst:.2e} <= 1e-8"))
}

fn wronskian_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(311);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(1..=50);
        let z = Complex64::from_polar(rng.gen_range(0.5..=100.0), rng.gen_range(-PI..PI));
        let r = wronskian_check(n, z).unwrap();
        let j = sph_j_seq(n + 1, z);
        let y = sph_y_seq(n + 1, z);
        // size of the two products the identity subtracts, and of its right side
        let scale = (j[n + 1] * y[n - 1])
            .norm()
            .max((j[n - 1] * y[n + 1]).norm())
            .max((2 * n + 1) as f64 / z.norm().powi(3));
        worst = worst.max(r.norm() / scale);
    }
    verdict(
        worst <= 1e-10,
        format!("max relative residual {worst:.2e} <= 1e-10 over 500 draws"),
    )
}

fn liouville_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rs: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = bump(rng.gen_range(-0.5..2.0));
        let k = Complex64::new(rng.gen_range(0.5..20.0), rng.gen_range(-2.0..2.0));
        for l in [0, 1, 5] {
            let f = liouville(&p, l).unwrap();
            let opts = RadialOptions {
                r0: None,
                checkpoints: Some(rs.clone()),
            };
            let rad = solve_radial_with(&p, l, k, 1e-10, &opts).unwrap();
            let xis: Vec<f64> = rad.samples.iter().map(|s| f.xi_of_r(s.r)).collect();
            let lio = solve_liouville_at(&f, k, 1e-10, &xis).unwrap();
            let scale = rad.samples.iter().map(|s| s.values().0.norm()).fold(0.0, f64::max);
            for (s, xi) in rad.samples.iter().zip(&xis) {
                let z = lio
                    .samples
                    .iter()
                    .find(|t| (t.xi - xi).abs() <= 1e-12 * (1.0 + xi))
                    .unwrap()
                    .values()
                    .0;
                let want = s.values().0 * p.n(s.r).powf(0.25);
                worst = worst.max((z - want).norm() / scale);
            }
        }
    }
    verdict(
        worst <= 1e-7,
        format!("max scaled gap {worst:.2e} <= 1e-7 (10 profiles, l = 0, 1, 5)"),
    )
}

fn pair() -> Vec<ProfileSpec> {
    vec![ProfileSpec::bump(1.0, 0.5), ProfileSpec::bump(1.0, 1.0)]
}

fn zero_density() -> Verdict {
    let mut config = ExperimentConfig::new(pair());
    config.k_window = Some(KWindow {
        re: [0.5, 61.0],
        im: Some([-31.0, 31.0]),
    });
    config.density = Some(DensityOptions {
        radii: Some((0..=24).map(|i| 12.0 + 2.0 * i as f64).collect()),
        ..DensityOptions::default()
    });
    let dir = tempfile::tempdir().unwrap();
    run(Command::Density, &config, dir.path()).unwrap();
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("density.json")).unwrap()).unwrap();
    let l0 = &doc["per_l"][0];
    let err = |w: &str| l0[w]["relative_error"].as_f64().unwrap();
    let got = |w: &str| l0[w]["density"].as_f64().unwrap();
    let (d, a, b) = (err("determinant"), err("a"), err("b"));
    verdict(
        d <= 0.05 && a <= 0.05 && b <= 0.05 && doc["sector_covered"] == true,
        format!(
            "density D_0 {:.4} ({:.2}%), a_0 {:.4} ({:.2}%), b_0 {:.4} ({:.2}%); each within 5%",
            got("determinant"),
            100.0 * d,
            got("a"),
            100.0 * a,
            got("b"),
            100.0 * b
        ),
    )
}

fn exponential_type_of_determinant() -> Verdict {
    let (pa, pb) = (bump(0.5), bump(1.0));
    let want = liouville(&pa, 0).unwrap().b() + liouville(&pb, 0).unwrap().b();
    let f = DeterminantSampler {
        profile_a: &pa,
        profile_b: &pb,
        l: 0,
        tol: 1e-10,
    };
    let fit = exponential_type(&f, true, 5.0, 200.0, 40).unwrap();
    let e = rel(fit.tau, want);
    verdict(
        e <= 0.05,
        format!("type {:.5} vs B1+B2 = {want:.5} ({:.2}%) within 5%", fit.tau, 100.0 * e),
    )
}

fn classical_asymptotics() -> Verdict {
    let frame = liouville(&bump(1.0), 0).unwrap();
    let r = validate_classical_asymptotics(&frame, &log_grid(10.0, 300.0, 400), 1e-12, 10).unwrap();
    let (v, d) = (
        r.value.slope.unwrap_or(f64::NAN),
        r.derivative.slope.unwrap_or(f64::NAN),
    );
    verdict(
        (v + 4.0).abs() <= 0.3 && (d + 3.0).abs() <= 0.3,
        format!("slopes {v:.3} (want -4 +- 0.3) and {d:.3} (want -3 +- 0.3)"),
    )
}

fn carlson_envelope() -> Verdict {
    let p = bump(1.0);
    let grid = |n: usize| -> Vec<Complex64> {
        log_grid(5.0, 500.0, n)
            .into_iter()
            .flat_map(|x| [0.0, 1.0, 2.0].map(|y| Complex64::new(x, y)))
            .collect()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for l in [0, 3] {
        let f = liouville(&p, l).unwrap();
        let fine = validate_carlson_bounds(&f, &grid(120), 1e-11).unwrap().carlson;
        let coarse = validate_carlson_bounds(&f, &grid(60), 1e-11).unwrap().carlson;
        let ceiling = fine.drift.unwrap_or(f64::INFINITY);
        let refine = rel(coarse.constant, fine.constant);
        pass &= fine.constant.is_finite() && ceiling < 0.1 && refine < 0.1;
        parts.push(format!(
            "l={l}: K {:.4}, drift {:.3} (ceiling halved) {:.3} (grid halved)",
            fine.constant, ceiling, refine
        ));
    }
    verdict(pass, format!("{}; each < 0.1", parts.join("; ")))
}

fn quotient_behaviour() -> Verdict {
    let (fa, fb) = (liouville(&bump(0.5), 0).unwrap(), liouville(&bump(1.0), 0).unwrap());
    let q = quotient_trace(&fa, &fb, 200.0, 8, 1e-10).unwrap();
    let slope = q.slope.unwrap_or(f64::NAN);
    let same = quotient_trace(&fb, &fb, 200.0, 8, 1e-10).unwrap();
    let gap = same.samples.iter().map(|s| (s.f - 1.0).abs()).fold(0.0, f64::max);
    verdict(
        (slope + 1.0).abs() <= 0.3 && gap <= 1e-12,
        format!(
            "tail slope {slope:.3} (want -1 +- 0.3), tail max {:.2e}; equal profiles max |F-1| {gap:.1e} <= 1e-12",
            q.tail_max
        ),
    )
}

fn residue_formula() -> Verdict {
    let frame = liouville(&bump(1.0), 0).unwrap();
    let r = residue_probe(&frame, &[5, 10, 20, 40, 80], 1e-11).unwrap();
    let at40 = r.samples.iter().find(|s| s.j == 40).unwrap().deviation();
    let q_gap = (r.q_direct - r.q_by_parts).abs();
    verdict(
        at40 <= 0.1 && q_gap <= 1e-9,
        format!("deviation at j=40 {at40:.4} <= 0.1; Q(B) two ways differ by {q_gap:.1e} <= 1e-9"),
    )
}

fn uniqueness_witness() -> Verdict {
    let opts = FarfieldOptions {
        k: 2.0,
        d: [0.0, 0.0, 1.0],
        samples: 201,
        l_max: None,
    };
    let farfield = |profiles: Vec<ProfileSpec>| {
        let mut config = ExperimentConfig::new(profiles);
        config.farfield = Some(opts.clone());
        let dir = tempfile::tempdir().unwrap();
        run(Command::Farfield, &config, dir.path()).unwrap();
        let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
        let doc: Value = serde_json::from_slice(&read("farfield.json")).unwrap();
        (doc, read("farfield.csv"), read("farfield_1.csv"))
    };
    let (distinct, ..) = farfield(pair());
    let (equal, csv_a, csv_b) = farfield(vec![ProfileSpec::bump(1.0, 1.0); 2]);
    let dist = distinct["distance"]["parseval"].as_f64().unwrap();
    let dist_equal = equal["distance"]["parseval"].as_f64().unwrap();
    let optical = [&distinct, &equal]
        .iter()
        .flat_map(|d| d["profiles"].as_array().unwrap().clone())
        .map(|p| p["optical_theorem"]["relative_error"].as_f64().unwrap())
        .fold(0.0, f64::max);
    verdict(
        dist > 1e-6 && csv_a == csv_b && dist_equal == 0.0 && optical <= 1e-6,
        format!(
            "distance {dist:.4e} > 1e-6; equal profiles byte-identical {} (distance {dist_equal:e}); optical theorem {optical:.1e} <= 1e-6",
            csv_a == csv_b
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 closed-form oracle", Duration::from_secs(10), closed_form_oracle),
        ("AC2 Wronskian identity", Duration::from_secs(5), wronskian_identity),
        (
            "AC3 Liouville equivalence",
            Duration::from_secs(60),
            liouville_equivalence,
        ),
        ("AC4 zero density", Duration::from_secs(600), zero_density),
        (
            "AC5 exponential type",
            Duration::from_secs(120),
            exponential_type_of_determinant,
        ),
        (
            "AC6 classical asymptotics",
            Duration::from_secs(120),
            classical_asymptotics,
        ),
        ("AC7 Carlson envelope", Duration::from_secs(180), carlson_envelope),
        ("AC8 quotient behaviour", Duration::from_secs(120), quotient_behaviour),
        ("AC9 residue formula", Duration::from_secs(180), residue_formula),
        ("AC10 uniqueness witness", Duration::from_secs(60), uniqueness_witness),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let pass = v.pass && took <= budget;
        failed += usize::from(!pass);
        println!(
            "{} {name}: {} | {:.2} s <= {} s",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
