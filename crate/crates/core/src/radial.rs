//! Regular solutions of `a'' + (k^2 n(r) - l(l+1)/r^2) a = 0` for complex
//! `k`, integrated in `r` or, after the Liouville map, in `xi`.
//!
//! The solution is normalised by `a(r) ~ r j_l(k r)` as `r -> 0`, that is
//! `a ~ k^l r^{l+1} / (2l+1)!!`. Integration starts at a small radius `r0`
//! from the power series of the constant-index solution
//! `n(0)^{-l/2} r j_l(k sqrt(n(0)) r)`. States are stored as mantissas with a
//! separate natural-log scale so large `|Im k|` does not overflow.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::media::{LiouvilleFrame, RefractiveProfile};
use crate::ode::{Checkpoint, Dop853, OdeSystem};

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Loosest tolerance accepted; accuracy claims stop at `1e-6`.
pub const MAX_TOL: f64 = 1e-2;
pub const MIN_TOL: f64 = 1e-13;

/// The integrator runs at `tol * INTERNAL_TOL_FACTOR`: local errors committed
/// across the power-law growth near the origin add up to roughly fifty times
/// the local tolerance.
const INTERNAL_TOL_FACTOR: f64 = 0.1;

/// One recorded point: the true values are `a * exp(log_scale)` and
/// `da * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub a: Complex64,
    pub da: Complex64,
    pub log_scale: f64,
}

impl RadialSample {
    /// `(a, a')` with the scale applied; may overflow for huge `|Im k|`.
    pub fn values(&self) -> (Complex64, Complex64) {
        let s = self.log_scale.exp();
        (self.a * s, self.da * s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub l: usize,
    pub k: Complex64,
    pub r0: f64,
    pub samples: Vec<RadialSample>,
}

impl RadialSolution {
    /// The sample at `r = R` (always the last one).
    pub fn end(&self) -> &RadialSample {
        self.samples.last().expect("a solution always holds its endpoint")
    }
}

/// Optional overrides for [`solve_radial_with`].
#[derive(Debug, Clone, Default)]
pub struct RadialOptions {
    /// Startup radius; defaults to [`startup_radius`].
    pub r0: Option<f64>,
    /// Radii at which to record the state, in `(r0, R]`; `R` is always added.
    pub checkpoints: Option<Vec<f64>>,
}

/// `r0 = max(1e-6, 1e-4 / (|k| (l+1))) R`.
pub fn startup_radius(radius: f64, l: usize, k: Complex64) -> f64 {
    (1e-6f64).max(1e-4 / (k.norm() * (l + 1) as f64)) * radius
}

fn check_inputs(k: Complex64, tol: f64) -> Result<()> {
    if k == Complex64::new(0.0, 0.0) || !k.re.is_finite() || !k.im.is_finite() {
        return Err(Error::InvalidK);
    }
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidArgument {
            module: "radial",
            reason: "tolerance outside [1e-13, 1e-2]",
        });
    }
    Ok(())
}

fn ln_double_factorial_odd(l: usize) -> f64 {
    (0..=l).map(|m| ((2 * m + 1) as f64).ln()).sum()
}

/// Series start: mantissas of `(a, a')` at `r0` and their log scale, for the
/// constant-index problem with `n = n0`.
fn initial_data(l: usize, k: Complex64, n0: f64, r0: f64) -> (Complex64, Complex64, f64) {
    let x = k * n0.sqrt() * r0;
    let x2 = x * x;
    let mut term = Complex64::new(1.0, 0.0);
    let mut s = term;
    let mut xds = Complex64::new(0.0, 0.0);
    for m in 1..40 {
        term *= -x2 / (2.0 * m as f64 * (2 * l + 2 * m + 1) as f64);
        s += term;
        xds += term * (2 * m) as f64;
        if term.norm() < 1e-18 * s.norm() {
            break;
        }
    }
    let lf = l as f64;
    let phase = Complex64::from_polar(1.0, lf * k.arg());
    let log_scale = lf * k.norm().ln() + lf * r0.ln() - ln_double_factorial_odd(l);
    let a = phase * s * r0;
    let da = phase * (s * (lf + 1.0) + xds);
    (a, da, log_scale)
}

fn rescale(y: &mut [Complex64], norm: f64) -> f64 {
    if norm > 1e50 || (norm < 1e-50 && norm > 0.0) {
        for v in y.iter_mut() {
            *v /= norm;
        }
        norm.ln()
    } else {
        0.0
    }
}

struct RSystem<'a> {
    profile: &'a RefractiveProfile,
    k2: Complex64,
    kk: f64,
    lf: f64,
    inv_r2: f64,
}

impl RSystem<'_> {
    fn kappa2(&self, r: f64) -> f64 {
        self.kk * self.profile.n(r) + self.lf / (r * r) + self.inv_r2
    }
}

impl OdeSystem<2> for RSystem<'_> {
    fn rhs(&self, r: f64, y: &[Complex64; 2]) -> [Complex64; 2] {
        let n = self.profile.n(r);
        [y[1], -(self.k2 * n - self.lf / (r * r)) * y[0]]
    }

    fn error_scale(&self, r: f64, y: &[Complex64; 2]) -> [f64; 2] {
        let k2 = self.kappa2(r);
        let e = (k2 * y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
        [e / k2.sqrt(), e]
    }

    fn renormalize(&self, r: f64, y: &mut [Complex64; 2]) -> f64 {
        let e = self.error_scale(r, y)[1];
        rescale(y, e)
    }
}

/// Integrates the radial equation from `r0` to `R`.
pub fn solve_radial(profile: &RefractiveProfile, l: usize, k: Complex64, tol: f64) -> Result<RadialSolution> {
    solve_radial_with(profile, l, k, tol, &RadialOptions::default())
}

/// [`solve_radial`] recording only the endpoint.
pub fn solve_radial_end(profile: &RefractiveProfile, l: usize, k: Complex64, tol: f64) -> Result<RadialSample> {
    let opts = RadialOptions {
        r0: None,
        checkpoints: Some(Vec::new()),
    };
    Ok(*solve_radial_with(profile, l, k, tol, &opts)?.end())
}

pub fn solve_radial_with(
    profile: &RefractiveProfile,
    l: usize,
    k: Complex64,
    tol: f64,
    opts: &RadialOptions,
) -> Result<RadialSolution> {
    check_inputs(k, tol)?;
    let radius = profile.radius();
    let r0 = opts.r0.unwrap_or_else(|| startup_radius(radius, l, k));
    let mut cps: Vec<f64> = match &opts.checkpoints {
        Some(v) => v.iter().copied().filter(|r| *r > r0 && *r < radius).collect(),
        None => (1..32).map(|i| radius * i as f64 / 32.0).filter(|r| *r > r0).collect(),
    };
    cps.sort_by(f64::total_cmp);
    cps.dedup();
    cps.push(radius);

    let n0 = profile.taylor0()[0];
    let (a0, da0, ls0) = initial_data(l, k, n0, r0);
    let sys = RSystem {
        profile,
        k2: k * k,
        kk: k.norm_sqr(),
        lf: (l * (l + 1)) as f64,
        inv_r2: 1.0 / (radius * radius),
    };
    let solver = Dop853::new(tol * INTERNAL_TOL_FACTOR, 1e-300);
    let tr = solver.integrate(&sys, r0, [a0, da0], &cps)?;
    let samples = tr
        .points
        .iter()
        .map(|p: &Checkpoint<2>| RadialSample {
            r: p.t,
            a: p.y[0],
            da: p.y[1],
            log_scale: p.log_scale + ls0,
        })
        .collect();
    Ok(RadialSolution { l, k, r0, samples })
}

/// Relative change of `(a(R), a'(R))` when the startup radius is halved.
pub fn startup_sensitivity(profile: &RefractiveProfile, l: usize, k: Complex64, tol: f64) -> Result<f64> {
    let r0 = startup_radius(profile.radius(), l, k);
    let run = |r: f64| {
        let opts = RadialOptions {
            r0: Some(r),
            checkpoints: Some(Vec::new()),
        };
        solve_radial_with(profile, l, k, tol, &opts).map(|s| *s.end())
    };
    let (s1, s2) = (run(r0)?, run(0.5 * r0)?);
    let shift = (s2.log_scale - s1.log_scale).exp();
    let (a2, d2) = (s2.a * shift, s2.da * shift);
    let base = (s1.a.norm_sqr() + s1.da.norm_sqr()).sqrt();
    Ok(((s1.a - a2).norm_sqr() + (s1.da - d2).norm_sqr()).sqrt() / base)
}

/// `n(0)^{(2l+1)/4}`: multiplying `z` by this makes it behave like
/// `k^l xi^{l+1}/(2l+1)!!` at the origin, the normalisation the free
/// Riccati–Bessel solution `k^l u_l` has. At `l = 0` it gives `z'(0) = 1`.
pub fn regular_factor(profile: &RefractiveProfile, l: usize) -> f64 {
    profile.taylor0()[0].powf((2 * l + 1) as f64 / 4.0)
}

/// One point of a solution in Liouville form: `z * exp(log_scale)` and
/// `z' * exp(log_scale)` at `xi`, with `r = r(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleSample {
    pub xi: f64,
    pub r: f64,
    pub z: Complex64,
    pub dz: Complex64,
    pub log_scale: f64,
}

impl LiouvilleSample {
    pub fn values(&self) -> (Complex64, Complex64) {
        let s = self.log_scale.exp();
        (self.z * s, self.dz * s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleSolution {
    pub l: usize,
    pub k: Complex64,
    pub b: f64,
    pub samples: Vec<LiouvilleSample>,
}

impl LiouvilleSolution {
    pub fn end(&self) -> &LiouvilleSample {
        self.samples.last().expect("a solution always holds its endpoint")
    }
}

struct XiSystem<'a> {
    frame: &'a LiouvilleFrame,
    k2: Complex64,
    kk: f64,
    inv_b2: f64,
    radius: f64,
}

impl OdeSystem<3> for XiSystem<'_> {
    fn rhs(&self, _xi: f64, y: &[Complex64; 3]) -> [Complex64; 3] {
        let r = y[0].re;
        let n = self.frame.profile().n(r);
        let p = self.frame.p_of_r(r);
        [
            Complex64::new(1.0 / n.sqrt(), 0.0),
            y[2],
            (Complex64::new(p, 0.0) - self.k2) * y[1],
        ]
    }

    fn error_scale(&self, _xi: f64, y: &[Complex64; 3]) -> [f64; 3] {
        let r = y[0].re;
        let k2 = self.kk + self.frame.p_of_r(r).abs() + self.inv_b2;
        let e = (k2 * y[1].norm_sqr() + y[2].norm_sqr()).sqrt();
        [self.radius, e / k2.sqrt(), e]
    }

    fn renormalize(&self, xi: f64, y: &mut [Complex64; 3]) -> f64 {
        let e = self.error_scale(xi, y)[2];
        let mut zs = [y[1], y[2]];
        let ln = rescale(&mut zs, e);
        y[1] = zs[0];
        y[2] = zs[1];
        ln
    }
}

/// Integrates `z'' + (k^2 - p(xi)) z = 0` from `xi(r0)` to `xi_end`
/// (default `B`; values past `B` continue into the exterior where `n = 1`).
/// The start values are the transform of the `r`-space series data, so
/// `z(xi(r)) = n(r)^{1/4} a(r)` with `a` as in [`solve_radial`].
pub fn solve_liouville(frame: &LiouvilleFrame, k: Complex64, tol: f64) -> Result<LiouvilleSolution> {
    solve_liouville_at(frame, k, tol, &[])
}

/// [`solve_liouville`] recording the state at the given `xi` values; the last
/// recorded point is `max(B, largest requested xi)`.
pub fn solve_liouville_at(frame: &LiouvilleFrame, k: Complex64, tol: f64, xis: &[f64]) -> Result<LiouvilleSolution> {
    check_inputs(k, tol)?;
    let profile = frame.profile();
    let l = frame.l();
    let radius = profile.radius();
    let r0 = startup_radius(radius, l, k);
    let xi0 = frame.xi_of_r(r0);
    let mut cps: Vec<f64> = xis.iter().copied().filter(|x| *x > xi0).collect();
    cps.push(frame.b());
    cps.sort_by(f64::total_cmp);
    cps.dedup();

    let [n0, _, _] = profile.taylor0();
    let (a0, da0, ls0) = initial_data(l, k, n0, r0);
    let [n, n1, _, _] = profile.eval(r0);
    let n14 = n.sqrt().sqrt();
    let z0 = a0 * n14;
    let dz0 = (da0 * n14 + a0 * (0.25 * n1 / (n14 * n14 * n14))) / n.sqrt();

    let sys = XiSystem {
        frame,
        k2: k * k,
        kk: k.norm_sqr(),
        inv_b2: 1.0 / (frame.b() * frame.b()),
        radius,
    };
    let solver = Dop853::new(tol * INTERNAL_TOL_FACTOR, 1e-300);
    let tr = solver.integrate(&sys, xi0, [Complex64::new(r0, 0.0), z0, dz0], &cps)?;
    let samples = tr
        .points
        .iter()
        .map(|p| LiouvilleSample {
            xi: p.t,
            r: p.y[0].re,
            z: p.y[1],
            dz: p.y[2],
            log_scale: p.log_scale + ls0,
        })
        .collect();
    Ok(LiouvilleSolution {
        l,
        k,
        b: frame.b(),
        samples,
    })
}
