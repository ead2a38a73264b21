//! The transmission determinant `D_l(k; R) = (a b' - a' b)/R` of two
//! profiles, and complex zero finding for entire functions of `k`:
//! argument-principle counting on rectangles, quadrisection with Newton
//! refinement, zero-density and exponential-type fits.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::{FRAC_PI_4, PI};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fit::{least_squares, line_fit};
use crate::media::RefractiveProfile;
use crate::radial::{solve_radial_end, RadialSample};

/// `D_l(k; R)` with the radial endpoint data it was built from. The value
/// is `value * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantSample {
    pub l: usize,
    pub k: Complex64,
    pub radius: f64,
    /// `a_l(R), a_l'(R)` of the first profile.
    pub a: RadialSample,
    /// `b_l(R), b_l'(R)` of the second profile.
    pub b: RadialSample,
    pub value: Complex64,
    pub log_scale: f64,
}

impl DeterminantSample {
    fn combine(a: &RadialSample, b: &RadialSample, radius: f64) -> (Complex64, f64) {
        ((a.a * b.da - a.da * b.a) / radius, a.log_scale + b.log_scale)
    }

    /// Recomputes `(value, log_scale)` from the stored ingredients; equal to
    /// the stored pair bit for bit.
    pub fn recompute(&self) -> (Complex64, f64) {
        Self::combine(&self.a, &self.b, self.radius)
    }

    /// `D` itself; overflows when `log_scale` is beyond about 709.
    pub fn d_value(&self) -> Complex64 {
        self.value * self.log_scale.exp()
    }

    pub fn ln_abs(&self) -> f64 {
        self.value.norm().ln() + self.log_scale
    }
}

/// Evaluates `D_l(k; R)` for the pair `(profile_a, profile_b)`, which must
/// share the support radius.
pub fn eval_determinant(
    profile_a: &RefractiveProfile,
    profile_b: &RefractiveProfile,
    l: usize,
    k: Complex64,
    tol: f64,
) -> Result<DeterminantSample> {
    if profile_a.radius() != profile_b.radius() {
        return Err(Error::InvalidArgument {
            module: "detroot",
            reason: "profiles must share the support radius",
        });
    }
    let a = solve_radial_end(profile_a, l, k, tol)?;
    let b = solve_radial_end(profile_b, l, k, tol)?;
    let radius = profile_a.radius();
    let (value, log_scale) = DeterminantSample::combine(&a, &b, radius);
    Ok(DeterminantSample {
        l,
        k,
        radius,
        a,
        b,
        value,
        log_scale,
    })
}

/// An entire function of `k` returned as `mantissa * exp(log_scale)`.
pub trait Sampler {
    fn sample(&self, k: Complex64) -> Result<(Complex64, f64)>;

    fn eval(&self, k: Complex64) -> Result<Complex64> {
        let (m, s) = self.sample(k)?;
        Ok(m * s.exp())
    }

    fn ln_abs(&self, k: Complex64) -> Result<f64> {
        let (m, s) = self.sample(k)?;
        Ok(m.norm().ln() + s)
    }
}

/// A plain closure `k -> f(k)`.
pub struct FnSampler<F>(pub F);

impl<F: Fn(Complex64) -> Complex64> Sampler for FnSampler<F> {
    fn sample(&self, k: Complex64) -> Result<(Complex64, f64)> {
        Ok(((self.0)(k), 0.0))
    }
}

/// `k -> D_l(k; R)` for a profile pair.
pub struct DeterminantSampler<'a> {
    pub profile_a: &'a RefractiveProfile,
    pub profile_b: &'a RefractiveProfile,
    pub l: usize,
    pub tol: f64,
}

impl Sampler for DeterminantSampler<'_> {
    fn sample(&self, k: Complex64) -> Result<(Complex64, f64)> {
        let d = eval_determinant(self.profile_a, self.profile_b, self.l, k, self.tol)?;
        Ok((d.value, d.log_scale))
    }
}

/// `k -> a_l(R; k)` for one profile.
pub struct RadialEndpointSampler<'a> {
    pub profile: &'a RefractiveProfile,
    pub l: usize,
    pub tol: f64,
}

impl Sampler for RadialEndpointSampler<'_> {
    fn sample(&self, k: Complex64) -> Result<(Complex64, f64)> {
        let s = solve_radial_end(self.profile, self.l, k, self.tol)?;
        Ok((s.a, s.log_scale))
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) && re_max > re_min && im_max > im_min;
        if !ok {
            return Err(Error::InvalidArgument {
                module: "detroot",
                reason: "rectangle needs finite, ordered bounds",
            });
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diagonal(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re >= self.re_min && k.re <= self.re_max && k.im >= self.im_min && k.im <= self.im_max
    }

    fn shifted(&self, d: Complex64) -> Rect {
        Rect {
            re_min: self.re_min + d.re,
            re_max: self.re_max + d.re,
            im_min: self.im_min + d.im,
            im_max: self.im_max + d.im,
        }
    }

    /// Four children, split at fraction `t` of each side.
    fn split(&self, t: f64) -> [Rect; 4] {
        let xm = self.re_min + t * (self.re_max - self.re_min);
        let ym = self.im_min + t * (self.im_max - self.im_min);
        [
            Rect {
                re_max: xm,
                im_max: ym,
                ..*self
            },
            Rect {
                re_min: xm,
                im_max: ym,
                ..*self
            },
            Rect {
                re_max: xm,
                im_min: ym,
                ..*self
            },
            Rect {
                re_min: xm,
                im_min: ym,
                ..*self
            },
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

const MAX_EDGE_DEPTH: usize = 40;
const MAX_BOX_DEPTH: usize = 40;
/// Fixed shift direction for boxes whose boundary passes through a zero.
const SHIFT_DIRECTION: (f64, f64) = (0.8, 0.6);
const SPLIT_FRACTIONS: [f64; 4] = [0.4937, 0.5127, 0.4731, 0.5311];

/// Why an edge could not be tracked.
enum EdgeTrouble {
    /// Phase still jumping at the finest allowed resolution, or an exact zero.
    Bottomed(Complex64),
    Fatal(Error),
}

impl From<Error> for EdgeTrouble {
    fn from(e: Error) -> Self {
        EdgeTrouble::Fatal(e)
    }
}

/// Memoised evaluation, keyed on the exact bits of `k`.
struct Memo<'a, S: Sampler + ?Sized> {
    f: &'a S,
    cache: RefCell<BTreeMap<(u64, u64), (Complex64, f64)>>,
}

impl<'a, S: Sampler + ?Sized> Memo<'a, S> {
    fn new(f: &'a S) -> Self {
        Memo {
            f,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    fn get(&self, k: Complex64) -> Result<(Complex64, f64)> {
        let key = (k.re.to_bits(), k.im.to_bits());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(*v);
        }
        let v = self.f.sample(k)?;
        if !(v.0.re.is_finite() && v.0.im.is_finite() && v.1.is_finite()) {
            return Err(Error::Overflow { at: k });
        }
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn evaluations(&self) -> usize {
        self.cache.borrow().len()
    }
}

fn phase_step(from: Complex64, to: Complex64) -> f64 {
    (to * from.conj()).arg()
}

fn lerp(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    Complex64::new(a.re + (b.re - a.re) * t, a.im + (b.im - a.im) * t)
}

/// Total change of `arg f` along the segment `a -> b`.
fn edge_phase<S: Sampler + ?Sized>(
    memo: &Memo<S>,
    a: Complex64,
    b: Complex64,
    spacing: f64,
) -> core::result::Result<f64, EdgeTrouble> {
    let pieces = ((b - a).norm() / spacing).ceil().max(1.0) as usize;
    let mut total = 0.0;
    // stack of (t0, t1, depth)
    let mut stack: Vec<(f64, f64, usize)> = (0..pieces)
        .rev()
        .map(|i| (i as f64 / pieces as f64, (i + 1) as f64 / pieces as f64, 0))
        .collect();
    while let Some((t0, t1, depth)) = stack.pop() {
        let (z0, z1) = (lerp(a, b, t0), lerp(a, b, t1));
        let tm = 0.5 * (t0 + t1);
        let zm = lerp(a, b, tm);
        if depth > MAX_EDGE_DEPTH {
            return Err(EdgeTrouble::Bottomed(zm));
        }
        let f0 = memo.get(z0)?.0;
        let f1 = memo.get(z1)?.0;
        let fm = memo.get(zm)?.0;
        if f0 == Complex64::new(0.0, 0.0) || f1 == Complex64::new(0.0, 0.0) || fm == Complex64::new(0.0, 0.0) {
            return Err(EdgeTrouble::Bottomed(zm));
        }
        let (d1, d2) = (phase_step(f0, fm), phase_step(fm, f1));
        if d1.abs() <= FRAC_PI_4 && d2.abs() <= FRAC_PI_4 {
            total += d1 + d2;
        } else {
            stack.push((tm, t1, depth + 1));
            stack.push((t0, tm, depth + 1));
        }
    }
    Ok(total)
}

fn winding<S: Sampler + ?Sized>(memo: &Memo<S>, rect: &Rect) -> core::result::Result<i64, EdgeTrouble> {
    let c = rect.corners();
    let spacing = (rect.diagonal() / 32.0).min(0.1);
    let mut total = 0.0;
    for i in 0..4 {
        total += edge_phase(memo, c[i], c[(i + 1) % 4], spacing)?;
    }
    let turns = total / (2.0 * PI);
    let n = turns.round();
    if (turns - n).abs() > 0.25 {
        return Err(EdgeTrouble::Bottomed(rect.center()));
    }
    Ok(n as i64)
}

/// Count and the (possibly shifted) rectangle it refers to.
fn count_shifting<S: Sampler + ?Sized>(memo: &Memo<S>, rect: &Rect) -> Result<(i64, Rect)> {
    let step = 1e-6 * rect.diagonal() / 3.0;
    let dir = Complex64::new(SHIFT_DIRECTION.0, SHIFT_DIRECTION.1);
    let mut last = rect.center();
    for attempt in 0..=3 {
        let r = rect.shifted(dir * (step * attempt as f64));
        match winding(memo, &r) {
            Ok(n) => return Ok((n, r)),
            Err(EdgeTrouble::Fatal(e)) => return Err(e),
            Err(EdgeTrouble::Bottomed(at)) => last = at,
        }
    }
    // a zero sitting on the contour keeps |f| tiny next to the failure point
    let here = memo.get(last)?.0.norm();
    let around = memo.get(last + Complex64::new(0.0, 1e-3 * rect.diagonal()))?.0.norm();
    if here < 1e-6 * around {
        Err(Error::BoundaryZero { attempts: 3 })
    } else {
        Err(Error::PhaseJump { at: last })
    }
}

/// Number of zeros of `f` inside `rect`, counted with multiplicity.
///
/// If the contour runs through a zero the box is moved by at most
/// `1e-6 * diagonal` in a fixed direction (three tries).
pub fn count_zeros<S: Sampler + ?Sized>(f: &S, rect: &Rect) -> Result<i64> {
    let memo = Memo::new(f);
    count_shifting(&memo, rect).map(|(n, _)| n)
}

/// A refined zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub k: Complex64,
    pub multiplicity: usize,
    /// `|f(k)| / (|f'(k)| (1 + |k|))`, roughly the relative distance to the
    /// true zero.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    /// Rectangle actually searched (shifted if the requested one touched a zero).
    pub rect: Rect,
    /// Sorted by real part, then imaginary part.
    pub zeros: Vec<Zero>,
    pub count_by_argument_principle: i64,
    pub evaluations: usize,
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn refinement_residuals(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.residual).collect()
    }
}

fn derivative_h(k: Complex64) -> f64 {
    1e-6 * (1.0 + k.norm())
}

/// `(f/f', |f|/|f'|)` at `k` by central differences.
fn newton_ratio<S: Sampler + ?Sized>(memo: &Memo<S>, k: Complex64) -> Result<(Complex64, f64)> {
    let h = derivative_h(k);
    let (m0, s0) = memo.get(k)?;
    if m0 == Complex64::new(0.0, 0.0) {
        return Ok((m0, 0.0));
    }
    let (mp, sp) = memo.get(k + h)?;
    let (mm, sm) = memo.get(k - h)?;
    let d = (mp * (sp - s0).exp() - mm * (sm - s0).exp()) / (2.0 * h);
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::NonConvergence { center: k, depth: 0 });
    }
    let step = crate::specfun::cdiv(m0, d);
    Ok((step, m0.norm() / d.norm()))
}

/// Newton iteration for a zero of multiplicity `m` inside `rect`.
fn newton<S: Sampler + ?Sized>(memo: &Memo<S>, rect: &Rect, start: Complex64, m: usize) -> Option<(Complex64, f64)> {
    let mut k = start;
    let limit = rect.diagonal();
    for _ in 0..60 {
        let (step, _) = newton_ratio(memo, k).ok()?;
        let step = step * m as f64;
        if !(step.norm() <= limit) {
            return None;
        }
        k -= step;
        if step.norm() <= 1e-13 * (1.0 + k.norm()) {
            break;
        }
    }
    let grow = 1e-9 * rect.diagonal();
    let inside = k.re >= rect.re_min - grow
        && k.re <= rect.re_max + grow
        && k.im >= rect.im_min - grow
        && k.im <= rect.im_max + grow;
    if !inside {
        return None;
    }
    let (_, ratio) = newton_ratio(memo, k).ok()?;
    Some((k, ratio * m as f64 / (1.0 + k.norm())))
}

fn refine<S: Sampler + ?Sized>(memo: &Memo<S>, rect: &Rect, n: i64, depth: usize, out: &mut Vec<Zero>) -> Result<()> {
    if n <= 0 {
        return Ok(());
    }
    if depth > MAX_BOX_DEPTH {
        return Err(Error::NonConvergence {
            center: rect.center(),
            depth,
        });
    }
    if n == 1 {
        if let Some((k, residual)) = newton(memo, rect, rect.center(), 1) {
            out.push(Zero {
                k,
                multiplicity: 1,
                residual,
            });
            return Ok(());
        }
    } else if rect.diagonal() < 1e-6 * (1.0 + rect.center().norm()) {
        if let Some((k, residual)) = newton(memo, rect, rect.center(), n as usize) {
            out.push(Zero {
                k,
                multiplicity: n as usize,
                residual,
            });
            return Ok(());
        }
    }
    for t in SPLIT_FRACTIONS {
        let kids = rect.split(t);
        let mut counts = [0i64; 4];
        let mut ok = true;
        for (c, kid) in counts.iter_mut().zip(&kids) {
            match winding(memo, kid) {
                Ok(v) => *c = v,
                Err(EdgeTrouble::Fatal(e)) => return Err(e),
                Err(EdgeTrouble::Bottomed(_)) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || counts.iter().sum::<i64>() != n {
            continue;
        }
        for (c, kid) in counts.iter().zip(&kids) {
            refine(memo, kid, *c, depth + 1, out)?;
        }
        return Ok(());
    }
    Err(Error::NonConvergence {
        center: rect.center(),
        depth,
    })
}

/// Locates all zeros of `f` in `rect`: quadrisection until a box holds one
/// zero (or shrinks onto a cluster), then Newton refinement.
pub fn find_zeros<S: Sampler + ?Sized>(f: &S, rect: &Rect) -> Result<ZeroSet> {
    let memo = Memo::new(f);
    let (count, used) = count_shifting(&memo, rect)?;
    let mut zeros = Vec::new();
    refine(&memo, &used, count, 0, &mut zeros)?;
    zeros.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    Ok(ZeroSet {
        rect: used,
        zeros,
        count_by_argument_principle: count,
        evaluations: memo.evaluations(),
    })
}

/// Least-squares zero density with its fit data.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFit {
    pub density: f64,
    /// Two standard errors of the slope.
    pub half_width: f64,
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Slope of `N(r)`, the number of zeros with `|k| <= r` and `|arg k| <= epsilon`,
/// against `r`. The zero set must cover the largest radius inside the sector;
/// the smallest radius is left out of the fit.
pub fn density_estimate(zeros: &ZeroSet, radii: &[f64], epsilon: f64) -> Result<DensityFit> {
    if radii.len() < 3 {
        return Err(Error::InsufficientData { got: radii.len() });
    }
    let mut rs = radii.to_vec();
    rs.sort_by(f64::total_cmp);
    let counts: Vec<usize> = rs
        .iter()
        .map(|r| {
            zeros
                .zeros
                .iter()
                .filter(|z| z.k.norm() <= *r && z.k.arg().abs() <= epsilon)
                .map(|z| z.multiplicity)
                .sum()
        })
        .collect();
    let xs = &rs[1..];
    let ys: Vec<f64> = counts[1..].iter().map(|c| *c as f64).collect();
    let (slope, _, se) = line_fit(xs, &ys)?;
    Ok(DensityFit {
        density: slope,
        half_width: 2.0 * se,
        radii: rs,
        counts,
    })
}

/// Fitted growth `ln|f(s i y)| = tau y + beta ln y + c` along `s = ±1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeFit {
    pub tau: f64,
    pub beta: f64,
    pub tau_stderr: f64,
    pub ys: Vec<f64>,
    pub ln_abs: Vec<f64>,
}

/// Exponential type along the imaginary axis from `samples` geometric
/// points in `[y0, y1]`; `upward` picks `+i`.
pub fn exponential_type<S: Sampler + ?Sized>(f: &S, upward: bool, y0: f64, y1: f64, samples: usize) -> Result<TypeFit> {
    if !(y0 > 0.0 && y1 > y0) || samples < 4 {
        return Err(Error::InvalidArgument {
            module: "detroot",
            reason: "type fit needs 0 < y0 < y1 and at least 4 samples",
        });
    }
    let sign = if upward { 1.0 } else { -1.0 };
    let ratio = (y1 / y0).powf(1.0 / (samples - 1) as f64);
    let ys: Vec<f64> = (0..samples).map(|i| y0 * ratio.powi(i as i32)).collect();
    let mut vals = Vec::with_capacity(samples);
    for y in &ys {
        let v = f.ln_abs(Complex64::new(0.0, sign * y))?;
        if !v.is_finite() {
            return Err(Error::Overflow {
                at: Complex64::new(0.0, sign * y),
            });
        }
        vals.push(v);
    }
    let rows: Vec<[f64; 3]> = ys.iter().map(|y| [*y, y.ln(), 1.0]).collect();
    let fit = least_squares(&rows, &vals)?;
    Ok(TypeFit {
        tau: fit.coef[0],
        beta: fit.coef[1],
        tau_stderr: fit.stderr[0],
        ys,
        ln_abs: vals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sinc(b: f64) -> FnSampler<impl Fn(Complex64) -> Complex64> {
        FnSampler(move |k: Complex64| (k * b).sin() / k)
    }

    #[test]
    fn counts_sin_over_k() {
        let r = Rect::new(0.5, 10.0, -1.0, 1.0).unwrap();
        assert_eq!(count_zeros(&sinc(1.0), &r).unwrap(), 3);
    }

    #[test]
    fn counts_double_zero() {
        let f = FnSampler(|k: Complex64| (k - c(2.0, 1.0)) * (k - c(2.0, 1.0)));
        let r = Rect::new(1.0, 3.0, 0.0, 2.0).unwrap();
        assert_eq!(count_zeros(&f, &r).unwrap(), 2);
        let z = find_zeros(&f, &r).unwrap();
        assert_eq!(z.total_multiplicity(), 2);
        assert_eq!(z.zeros.len(), 1);
        assert!((z.zeros[0].k - c(2.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn finds_sinc_zeros_b2() {
        let r = Rect::new(0.5, 10.0, -1.0, 1.0).unwrap();
        let z = find_zeros(&sinc(2.0), &r).unwrap();
        assert_eq!(z.zeros.len(), 6);
        for (i, zero) in z.zeros.iter().enumerate() {
            let want = (i + 1) as f64 * PI / 2.0;
            assert!((zero.k - c(want, 0.0)).norm() < 1e-10, "{} vs {want}", zero.k);
            assert!(zero.residual < 1e-9);
        }
    }

    #[test]
    fn zero_on_contour_is_handled_by_shifting() {
        // pi lies on the left edge
        let r = Rect::new(PI, 7.0, -1.0, 1.0).unwrap();
        let n = count_zeros(&sinc(1.0), &r).unwrap();
        assert!(n == 1 || n == 2);
    }

    #[test]
    fn density_and_type_of_sinc() {
        let f = sinc(2.0);
        let r = Rect::new(0.5, 61.0, -1.0, 1.0).unwrap();
        let z = find_zeros(&f, &r).unwrap();
        let radii: Vec<f64> = (1..=12).map(|i| 5.0 * i as f64).collect();
        let d = density_estimate(&z, &radii, 0.5).unwrap();
        assert!((d.density - 2.0 / PI).abs() < 0.05 * 2.0 / PI, "{}", d.density);
        let t = exponential_type(&f, true, 1.0, 50.0, 30).unwrap();
        assert!((t.tau - 2.0).abs() < 0.02 * 2.0);
    }

    #[test]
    fn too_few_radii() {
        let z = ZeroSet {
            rect: Rect::new(0.0, 1.0, 0.0, 1.0).unwrap(),
            zeros: Vec::new(),
            count_by_argument_principle: 0,
            evaluations: 0,
        };
        assert_eq!(
            density_estimate(&z, &[1.0, 2.0], 0.1),
            Err(Error::InsufficientData { got: 2 })
        );
    }
}
