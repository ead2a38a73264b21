//! Spherical Bessel functions of integer order and complex argument,
//! Riccati–Bessel solutions of the free radial equation, the variation of
//! parameters kernels built from them, and Legendre polynomials.
//!
//! `j_l` comes from Miller's backward recurrence normalised against the
//! closed forms of `j_0`/`j_1`; `y_l` from the forward recurrence, which is
//! stable for the dominant solution. Internally every sequence is computed
//! with the factor `exp(-|Im z|)` removed so large imaginary arguments do not
//! overflow before the caller decides how to rescale.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Default largest order accepted by [`sph_bessel`].
pub const L_MAX: usize = 200;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `j_l(z)` and `y_l(z)` for one order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub order: usize,
    pub argument: Complex64,
    pub j_value: Complex64,
    pub y_value: Complex64,
}

/// `(sin z, cos z) * exp(-|Im z|)`.
pub fn scaled_sin_cos(z: Complex64) -> (Complex64, Complex64) {
    let (s, c) = (z.re.sin(), z.re.cos());
    let a = z.im.abs();
    let e2 = (-2.0 * a).exp();
    let ch = 0.5 * (1.0 + e2);
    let sh = -0.5 * (-2.0 * a).exp_m1() * z.im.signum();
    (Complex64::new(s * ch, c * sh), Complex64::new(c * ch, -s * sh))
}

/// `a / b` without forming `|b|^2`, which overflows for `|b| > 1e154`.
pub(crate) fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

fn unscale(v: Complex64, im_abs: f64) -> Complex64 {
    if im_abs == 0.0 {
        return v;
    }
    let half = (0.5 * im_abs).exp();
    v * half * half
}

/// Order at which the backward recurrence for `j` is started.
///
/// A trial forward recurrence of the dominant solution is run from the
/// turning region until it has grown by `1e9`, so the minimal solution is
/// resolved to roughly `1e-18` relative at the requested order.
fn miller_start(z: Complex64, top: usize) -> usize {
    let az = z.norm();
    let base = top + core::cmp::max(20, az.ceil() as usize);
    let mut m = core::cmp::max(top, az.ceil() as usize) + 1;
    let (mut p0, mut p1) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let cap = m + 100_000;
    while m < cap {
        let p2 = p1 * ((2 * m + 1) as f64) / z - p0;
        p0 = p1;
        p1 = p2;
        m += 1;
        if p1.norm() > 1e9 {
            break;
        }
    }
    core::cmp::max(base, m + 10)
}

/// `exp(-|Im z|) * j_l(z)` for `l = 0..=top`.
pub fn sph_j_scaled_seq(top: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); top + 1];
    if z == Complex64::new(0.0, 0.0) {
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }
    let (s, c) = scaled_sin_cos(z);
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    out[0] = j0;
    if top == 0 {
        return out;
    }

    let start = miller_start(z, top);
    let inv_z = cdiv(Complex64::new(1.0, 0.0), z);
    let mut upper = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    for m in (1..=start).rev() {
        if m <= top {
            out[m] = cur;
        }
        let lower = cur * inv_z * ((2 * m + 1) as f64) - upper;
        upper = cur;
        cur = lower;
        if cur.norm() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            upper *= RESCALE_BY;
            for v in out.iter_mut().skip(m) {
                *v *= RESCALE_BY;
            }
        }
    }
    // `cur` now holds the trial j_0, `out[1]` the trial j_1
    let scale = if j0.norm() >= j1.norm() {
        cdiv(j0, cur)
    } else {
        cdiv(j1, out[1])
    };
    out[0] = j0;
    for v in out.iter_mut().skip(1) {
        *v *= scale;
    }
    out
}

/// `exp(-|Im z|) * y_l(z)` for `l = 0..=top`.
///
/// On the real axis `y` is the dominant solution of the recurrence and is
/// run upward directly. Off the axis the upward recurrence of `y` cancels,
/// so the exponentially small Hankel function (`h1` above the axis, `h2`
/// below) is run upward instead and `y` recovered from it and `j`.
pub fn sph_y_scaled_seq(top: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(top + 1);
    if z.im == 0.0 {
        let (s, c) = scaled_sin_cos(z);
        out.push(-c / z);
        if top >= 1 {
            out.push(-c / (z * z) - s / z);
        }
        for m in 1..top {
            let next = out[m] * ((2 * m + 1) as f64) / z - out[m - 1];
            out.push(next);
        }
        return out;
    }
    let i = Complex64::i();
    let upper = z.im > 0.0;
    // exp(+-iz) exp(-|Im z|) = exp(+-i Re z) exp(-2|Im z|)
    let e = Complex64::from_polar((-2.0 * z.im.abs()).exp(), if upper { z.re } else { -z.re });
    let (h0, h1) = if upper {
        (-i * e / z, -e * (z + i) / (z * z))
    } else {
        (i * e / z, -e * (z - i) / (z * z))
    };
    let j = sph_j_scaled_seq(top, z);
    let mut h = Vec::with_capacity(top + 1);
    h.push(h0);
    if top >= 1 {
        h.push(h1);
    }
    for m in 1..top {
        let next = h[m] * ((2 * m + 1) as f64) / z - h[m - 1];
        h.push(next);
    }
    // h1 = j + i y and h2 = j - i y
    for (jm, hm) in j.iter().zip(&h) {
        out.push(if upper { i * (jm - hm) } else { i * (hm - jm) });
    }
    out
}

/// `j_l(z)` for `l = 0..=top`.
pub fn sph_j_seq(top: usize, z: Complex64) -> Vec<Complex64> {
    let a = z.im.abs();
    let mut v = sph_j_scaled_seq(top, z);
    v.iter_mut().for_each(|x| *x = unscale(*x, a));
    v
}

/// `y_l(z)` for `l = 0..=top`.
pub fn sph_y_seq(top: usize, z: Complex64) -> Vec<Complex64> {
    let a = z.im.abs();
    let mut v = sph_y_scaled_seq(top, z);
    v.iter_mut().for_each(|x| *x = unscale(*x, a));
    v
}

/// `j_l(z)`, `y_l(z)` with the default order limit [`L_MAX`].
///
/// At `z = 0` the limits `j_0 = 1`, `j_l = 0` are returned together with an
/// infinite `y_l`.
pub fn sph_bessel(l: usize, z: Complex64) -> Result<BesselPair> {
    sph_bessel_with_limit(l, z, L_MAX)
}

pub fn sph_bessel_with_limit(l: usize, z: Complex64, l_max: usize) -> Result<BesselPair> {
    if l > l_max {
        return Err(Error::OrderOverflow { order: l, limit: l_max });
    }
    if z == Complex64::new(0.0, 0.0) {
        let j = if l == 0 { 1.0 } else { 0.0 };
        return Ok(BesselPair {
            order: l,
            argument: z,
            j_value: Complex64::new(j, 0.0),
            y_value: Complex64::new(f64::NEG_INFINITY, 0.0),
        });
    }
    let j = sph_j_seq(l, z)[l];
    let y = sph_y_seq(l, z)[l];
    Ok(BesselPair {
        order: l,
        argument: z,
        j_value: j,
        y_value: y,
    })
}

/// Spherical Hankel function of the first kind, `h_l = j_l + i y_l`.
pub fn sph_hankel1(l: usize, z: Complex64) -> Complex64 {
    let j = sph_j_seq(l, z)[l];
    let y = sph_y_seq(l, z)[l];
    j + Complex64::i() * y
}

/// `j_n(z)` for any integer `n`, negative orders reached by running the
/// three-term recurrence downward from `j_0`, `j_1`.
pub fn sph_j_signed(n: i64, z: Complex64) -> Complex64 {
    if n >= 0 {
        return sph_j_seq(n as usize, z)[n as usize];
    }
    let (s, c) = (z.sin(), z.cos());
    let mut upper = s / (z * z) - c / z; // j_1
    let mut cur = s / z; // j_0
    let mut m: i64 = 0;
    while m > n {
        let lower = cur * ((2 * m + 1) as f64) / z - upper;
        upper = cur;
        cur = lower;
        m -= 1;
    }
    cur
}

/// `j_{n+1} y_{n-1} - j_{n-1} y_{n+1} - (2n+1) z^{-3}`.
pub fn wronskian_check(n: usize, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument {
            module: "specfun",
            reason: "wronskian check needs n >= 1",
        });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument {
            module: "specfun",
            reason: "wronskian check needs z != 0",
        });
    }
    if n + 1 > L_MAX + 1 {
        return Err(Error::OrderOverflow {
            order: n + 1,
            limit: L_MAX,
        });
    }
    let a = z.im.abs();
    let j = sph_j_scaled_seq(n + 1, z);
    let y = sph_y_scaled_seq(n + 1, z);
    // both factors carry exp(-a); the right side is unscaled
    let lhs = j[n + 1] * y[n - 1] - j[n - 1] * y[n + 1];
    let rhs = Complex64::new((2 * n + 1) as f64, 0.0) / (z * z * z);
    Ok(unscale(unscale(lhs, a), a) - rhs)
}

/// Regular Riccati–Bessel solution of `u'' + (k^2 - l(l+1)/x^2) u = 0`,
/// normalised as `u_l(x; k) = x j_l(k x) / k^l`, and its `x`-derivative.
pub fn riccati_u(l: usize, xi: f64, k: Complex64) -> Result<(Complex64, Complex64)> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidK);
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidArgument {
            module: "specfun",
            reason: "riccati_u needs xi > 0",
        });
    }
    if l > L_MAX {
        return Err(Error::OrderOverflow { order: l, limit: L_MAX });
    }
    let z = k * xi;
    let j = sph_j_seq(l, z);
    let kl = k.powi(l as i32);
    let u = j[l] * xi / kl;
    let du = if l == 0 {
        z.cos()
    } else {
        (z * j[l - 1] - j[l] * (l as f64)) / kl
    };
    Ok((u, du))
}

/// Riccati–Bessel pair at `x`: `(x j_l, d/dx[x j_l], x y_l, d/dx[x y_l])`.
fn riccati_pair(l: usize, x: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    let j = sph_j_seq(l, x);
    let y = sph_y_seq(l, x);
    let (jm, ym) = if l == 0 {
        (x.cos() / x, x.sin() / x)
    } else {
        (j[l - 1], y[l - 1])
    };
    let lf = l as f64;
    (x * j[l], x * jm - j[l] * lf, x * y[l], x * ym - y[l] * lf)
}

/// Kernels `Phi(z,w) = phi1(z) phi2(w) - phi1(w) phi2(z)` and
/// `Psi(z,w) = phi1(z) phi2'(w) - phi1'(w) phi2(z)`.
///
/// `phi2(x) = x j_l(x)` and `phi1(x) = -x y_l(x)`; the sign on `phi1` makes
/// the Wronskian `phi1 phi2' - phi1' phi2` equal to `+1`.
pub fn phi_psi_kernels(z: Complex64, w: Complex64, l: usize) -> Result<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    if z == zero || w == zero {
        return Err(Error::InvalidArgument {
            module: "specfun",
            reason: "kernels need nonzero arguments",
        });
    }
    if l > L_MAX {
        return Err(Error::OrderOverflow { order: l, limit: L_MAX });
    }
    let (p2z, _, yz, _) = riccati_pair(l, z);
    let (p2w, dp2w, yw, dyw) = riccati_pair(l, w);
    let (p1z, p1w, dp1w) = (-yz, -yw, -dyw);
    let phi = p1z * p2w - p1w * p2z;
    let psi = p1z * dp2w - dp1w * p2z;
    Ok((phi, psi))
}

/// Legendre polynomial `P_l(t)` by the three-term recurrence.
pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return p0;
    }
    for m in 1..l {
        let mf = m as f64;
        let p2 = ((2.0 * mf + 1.0) * t * p1 - mf * p0) / (mf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_0(t) ..= P_top(t)`.
pub fn legendre_seq(top: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(top + 1);
    out.push(1.0);
    if top >= 1 {
        out.push(t);
    }
    for m in 1..top {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0) * t * out[m] - mf * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}

/// Cylinder function `J_m(x)` of integer order and real argument.
///
/// Backward recurrence normalised with `J_0 + 2 sum J_{2k} = 1`; negative
/// orders use `J_{-m} = (-1)^m J_m`.
pub fn cyl_bessel_j_int(m: i64, x: f64) -> f64 {
    let order = m.unsigned_abs() as usize;
    let sign = if m < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let start = {
        let base = order + core::cmp::max(20, ax.ceil() as usize);
        let mut n = core::cmp::max(order, ax.ceil() as usize) + 1;
        let (mut p0, mut p1) = (0.0f64, 1.0f64);
        let cap = n + 100_000;
        while n < cap {
            let p2 = 2.0 * (n as f64) / ax * p1 - p0;
            p0 = p1;
            p1 = p2;
            n += 1;
            if p1.abs() > 1e9 {
                break;
            }
        }
        let s = core::cmp::max(base, n + 10);
        s + (s % 2)
    };
    let mut upper = 0.0f64;
    let mut cur = 1e-30f64;
    let mut wanted = 0.0f64;
    let mut norm = 0.0f64;
    for n in (1..=start).rev() {
        if n == order {
            wanted = cur;
        }
        if n % 2 == 0 {
            norm += 2.0 * cur;
        }
        let lower = 2.0 * (n as f64) / ax * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            upper *= RESCALE_BY;
            wanted *= RESCALE_BY;
            norm *= RESCALE_BY;
        }
    }
    if order == 0 {
        wanted = cur;
    }
    norm += cur;
    let mut v = wanted / norm;
    // J_m(-x) = (-1)^m J_m(x)
    if x < 0.0 && order % 2 == 1 {
        v = -v;
    }
    sign * v
}

/// Spherical Bessel function `j_nu(x) = sqrt(pi/2x) J_{nu+1/2}(x)` for
/// `nu = twice_order / 2`, an integer or half-integer, and real `x > 0`.
///
/// Half-integer `nu` lands on integer-order cylinder functions, which is
/// how sequences over `1/2 + Z` are evaluated.
pub fn sph_j_half_integer(twice_order: i64, x: f64) -> f64 {
    if twice_order % 2 == 0 {
        return sph_j_signed(twice_order / 2, Complex64::new(x, 0.0)).re;
    }
    let m = (twice_order + 1) / 2;
    (core::f64::consts::PI / (2.0 * x)).sqrt() * cyl_bessel_j_int(m, x)
}
