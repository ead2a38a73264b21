//! Plane-wave scattering by a radial medium.
//!
//! Inside `r < R` the field of order `l` is a multiple of `a_l(r)/r`; outside
//! it is `j_l(kr) + i T_l h_l(kr)` up to the plane-wave weight `(2l+1) i^l`.
//! With this convention `1 + 2i T_l` is the partial-wave S-matrix element and
//! the far-field pattern, normalised by `u^s ~ e^{ik|x|}/|x| u_inf`, is
//! `u_inf(t) = (1/k) sum (2l+1) T_l P_l(t)` with `t = x.d`.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::media::RefractiveProfile;
use crate::quad::{gauss_legendre, gl_integrate};
use crate::radial::solve_radial_end;
use crate::specfun::{legendre_seq, sph_j_seq, sph_y_seq, L_MAX};

/// Series terms are dropped once `|T_l|` falls below this past `l = kR`.
pub const TAIL_TOL: f64 = 1e-12;

/// Matching determinants below this fraction of their natural scale are
/// treated as singular.
const SINGULAR_REL: f64 = 1e-14;

/// One partial wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialWaveData {
    pub l: usize,
    pub k: f64,
    pub t: Complex64,
    /// `(a_l(R), a_l'(R))` as mantissas; both carry the factor `exp(log_scale)`.
    pub interior_match: (Complex64, Complex64),
    pub log_scale: f64,
}

impl PartialWaveData {
    /// The S-matrix element `1 + 2i T_l`.
    pub fn s_matrix(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) + Complex64::new(0.0, 2.0) * self.t
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument {
            module: "scatter",
            reason: "wavenumber must be positive and finite",
        });
    }
    Ok(())
}

/// `j_l, j_l', h_l, h_l'` at `x` for `l = 0..=top`.
fn exterior_functions(top: usize, x: f64) -> Vec<[Complex64; 4]> {
    let z = Complex64::new(x, 0.0);
    let j = sph_j_seq(top + 1, z);
    let y = sph_y_seq(top + 1, z);
    let i = Complex64::i();
    (0..=top)
        .map(|l| {
            // f_l' = -f_{l+1} + l f_l / x holds for both j and y
            let lf = l as f64 / x;
            let dj = j[l] * lf - j[l + 1];
            let dy = y[l] * lf - y[l + 1];
            [j[l], dj, j[l] + i * y[l], dj + i * dy]
        })
        .collect()
}

fn match_order(
    profile: &RefractiveProfile,
    l: usize,
    k: f64,
    tol: f64,
    ext: &[Complex64; 4],
) -> Result<PartialWaveData> {
    let radius = profile.radius();
    let kc = Complex64::new(k, 0.0);
    let end = solve_radial_end(profile, l, kc, tol)?;
    // u = a / r and its derivative, up to the common factor exp(log_scale)
    let norm = (end.a.norm_sqr() + (end.da * radius).norm_sqr()).sqrt();
    let psi = end.a / (radius * norm);
    let dpsi = (end.da * radius - end.a) / (radius * radius * norm);
    let [j, dj, h, dh] = *ext;
    let num = dpsi * j - psi * k * dj;
    let den = psi * k * dh - dpsi * h;
    let scale = (psi.norm() + dpsi.norm()) * (h.norm() + k * dh.norm());
    if !(den.norm() >= SINGULAR_REL * scale) || !scale.is_finite() {
        return Err(Error::MatchSingular { l, k });
    }
    // num / den is the coefficient of h_l; the far-field convention absorbs i
    let t = -Complex64::i() * num / den;
    Ok(PartialWaveData {
        l,
        k,
        t,
        interior_match: (end.a, end.da),
        log_scale: end.log_scale,
    })
}

/// Matches the interior regular solution to `j_l + i T_l h_l` at `r = R`.
pub fn t_matrix(profile: &RefractiveProfile, l: usize, k: f64, tol: f64) -> Result<PartialWaveData> {
    check_k(k)?;
    if l >= L_MAX {
        return Err(Error::OrderOverflow { order: l, limit: L_MAX });
    }
    let ext = exterior_functions(l, k * profile.radius());
    match_order(profile, l, k, tol, &ext[l])
}

/// The default order cap `4 ceil(kR) + 40`, clipped to the Bessel limit.
pub fn default_l_cap(k: f64, radius: f64) -> usize {
    (4 * (k * radius).ceil() as usize + 40).min(L_MAX - 1)
}

/// T-matrix entries `T_0 ..= T_{l_max}` for one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialWaveSeries {
    pub k: f64,
    pub radius: f64,
    pub t: Vec<Complex64>,
    /// True when an automatic cut-off hit its cap before `|T_l|` fell below
    /// [`TAIL_TOL`].
    pub truncated: bool,
    /// `|T_{l_max}|`, a proxy for the neglected tail.
    pub tail_estimate: f64,
}

/// Computes the partial-wave series.
///
/// With `l_max = None` orders are added until `|T_l| < TAIL_TOL` for some
/// `l > kR`, up to [`default_l_cap`]. An explicit `l_max` is used as given.
pub fn partial_waves(profile: &RefractiveProfile, k: f64, l_max: Option<usize>, tol: f64) -> Result<PartialWaveSeries> {
    check_k(k)?;
    let radius = profile.radius();
    let cap = match l_max {
        Some(l) if l >= L_MAX => {
            return Err(Error::OrderOverflow {
                order: l,
                limit: L_MAX - 1,
            })
        }
        Some(l) => l,
        None => default_l_cap(k, radius),
    };
    let ext = exterior_functions(cap, k * radius);
    let mut t = Vec::with_capacity(cap + 1);
    let mut converged = false;
    for (l, e) in ext.iter().enumerate() {
        let tl = if profile.is_trivial() {
            Complex64::new(0.0, 0.0)
        } else {
            match_order(profile, l, k, tol, e)?.t
        };
        t.push(tl);
        if l_max.is_none() && tl.norm() < TAIL_TOL && l as f64 > k * radius {
            converged = true;
            break;
        }
    }
    let tail_estimate = t.last().map_or(0.0, |v| v.norm());
    Ok(PartialWaveSeries {
        k,
        radius,
        truncated: l_max.is_none() && !converged,
        tail_estimate,
        t,
    })
}

impl PartialWaveSeries {
    pub fn l_max(&self) -> usize {
        self.t.len() - 1
    }

    /// `u_inf` at `t = x.d`, summed in ascending order.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let p = legendre_seq(self.l_max(), t);
        let mut sum = Complex64::new(0.0, 0.0);
        for (l, (tl, pl)) in self.t.iter().zip(&p).enumerate() {
            sum += tl * ((2 * l + 1) as f64 * pl);
        }
        sum / self.k
    }

    /// Exterior expansion coefficients `c_l = (2l+1) i^{l+1} T_l` of
    /// `u^s = sum c_l h_l(kr) P_l(x.d)`.
    pub fn rellich_coefficients(&self) -> Vec<Complex64> {
        let mut phase = Complex64::i();
        self.t
            .iter()
            .enumerate()
            .map(|(l, tl)| {
                let c = tl * phase * (2 * l + 1) as f64;
                phase *= Complex64::i();
                c
            })
            .collect()
    }

    /// Scattered field at distance `r >= R` and `t = x.d` from the Hankel series.
    pub fn scattered_field(&self, r: f64, t: f64) -> Result<Complex64> {
        if !(r >= self.radius) {
            return Err(Error::InvalidArgument {
                module: "scatter",
                reason: "scattered field is only available outside the support",
            });
        }
        let ext = exterior_functions(self.l_max(), self.k * r);
        let p = legendre_seq(self.l_max(), t);
        let mut sum = Complex64::new(0.0, 0.0);
        for ((c, e), pl) in self.rellich_coefficients().iter().zip(&ext).zip(&p) {
            sum += c * e[2] * *pl;
        }
        Ok(sum)
    }

    /// Compares `Im u_inf(1)` with `(k/4pi) int_{S^2} |u_inf|^2`, the sphere
    /// integral done by Gauss–Legendre quadrature in `t`.
    pub fn optical_theorem(&self) -> OpticalCheck {
        let forward = self.amplitude(1.0).im;
        let rule = gauss_legendre(self.l_max() + 2);
        let sphere = 2.0 * core::f64::consts::PI * gl_integrate(|t| self.amplitude(t).norm_sqr(), -1.0, 1.0, &rule);
        let flux = self.k / (4.0 * core::f64::consts::PI) * sphere;
        let denom = forward.abs().max(flux.abs());
        let relative_error = if denom == 0.0 {
            0.0
        } else {
            (forward - flux).abs() / denom
        };
        OpticalCheck {
            forward_imag: forward,
            flux,
            relative_error,
        }
    }

    /// L^2(S^2) distance between two far fields at the same `k`: the
    /// Parseval sum and an independent quadrature of `|u_a - u_b|^2`.
    pub fn distance(&self, other: &PartialWaveSeries) -> Result<FarFieldDistance> {
        if self.k != other.k {
            return Err(Error::InvalidArgument {
                module: "scatter",
                reason: "far fields must share the wavenumber",
            });
        }
        let top = self.l_max().max(other.l_max());
        let zero = Complex64::new(0.0, 0.0);
        let mut parseval = 0.0;
        for l in 0..=top {
            let d = self.t.get(l).copied().unwrap_or(zero) - other.t.get(l).copied().unwrap_or(zero);
            parseval += (2 * l + 1) as f64 * d.norm_sqr();
        }
        parseval *= 4.0 * core::f64::consts::PI / (self.k * self.k);
        let rule = gauss_legendre(top + 2);
        let quadrature = 2.0
            * core::f64::consts::PI
            * gl_integrate(
                |t| (self.amplitude(t) - other.amplitude(t)).norm_sqr(),
                -1.0,
                1.0,
                &rule,
            );
        Ok(FarFieldDistance {
            parseval: parseval.sqrt(),
            quadrature: quadrature.max(0.0).sqrt(),
        })
    }
}

/// Both sides of the optical theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalCheck {
    pub forward_imag: f64,
    pub flux: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldDistance {
    pub parseval: f64,
    pub quadrature: f64,
}

/// Far-field samples for incidence direction `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub k: f64,
    pub d: [f64; 3],
    /// `(t, u_inf(t))` with `t = x.d`.
    pub samples: Vec<(f64, Complex64)>,
    pub series: PartialWaveSeries,
}

impl FarField {
    /// `u_inf` in observation direction `x` (a unit vector).
    pub fn at_direction(&self, x: [f64; 3]) -> Result<Complex64> {
        check_unit(x)?;
        Ok(self.series.amplitude(dot(x, self.d).clamp(-1.0, 1.0)))
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit(d: [f64; 3]) -> Result<()> {
    if !((dot(d, d).sqrt() - 1.0).abs() < 1e-12) {
        return Err(Error::InvalidArgument {
            module: "scatter",
            reason: "direction must be a unit vector",
        });
    }
    Ok(())
}

/// Samples `u_inf(t)` at the given cosines `t` in `[-1, 1]`.
pub fn far_field(
    profile: &RefractiveProfile,
    k: f64,
    d: [f64; 3],
    ts: &[f64],
    l_max: Option<usize>,
    tol: f64,
) -> Result<FarField> {
    check_unit(d)?;
    if ts.iter().any(|t| !(t.abs() <= 1.0)) {
        return Err(Error::InvalidArgument {
            module: "scatter",
            reason: "angle cosines must lie in [-1, 1]",
        });
    }
    let series = partial_waves(profile, k, l_max, tol)?;
    let samples = ts.iter().map(|t| (*t, series.amplitude(*t))).collect();
    Ok(FarField { k, d, samples, series })
}

/// Exterior expansion coefficients of the scattered field; see
/// [`PartialWaveSeries::rellich_coefficients`].
pub fn rellich_coefficients(
    profile: &RefractiveProfile,
    k: f64,
    l_max: Option<usize>,
    tol: f64,
) -> Result<Vec<Complex64>> {
    Ok(partial_waves(profile, k, l_max, tol)?.rellich_coefficients())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{make_profile, ProfileFamily};

    fn bump(c: f64) -> RefractiveProfile {
        make_profile(ProfileFamily::Bump, 1.0, &[c]).unwrap()
    }

    #[test]
    fn free_space_does_not_scatter() {
        let p = make_profile(ProfileFamily::ConstantOne, 1.0, &[]).unwrap();
        for l in [0, 3, 12] {
            assert!(t_matrix(&p, l, 2.5, 1e-10).unwrap().t.norm() < 1e-9);
        }
        let ff = far_field(&p, 2.0, [0.0, 0.0, 1.0], &[-1.0, 0.0, 1.0], None, 1e-10).unwrap();
        assert!(ff.samples.iter().all(|(_, u)| *u == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn s_wave_matches_reference() {
        // high-precision Taylor integration of the radial equation, matched
        // to the exterior Bessel functions
        let t = t_matrix(&bump(1.0), 0, 2.0, 1e-10).unwrap().t;
        let want = Complex64::new(0.308_000_048_283_437, 0.106_126_961_753_662_97);
        assert!((t - want).norm() < 1e-9, "{t}");
    }

    #[test]
    fn partial_waves_are_unitary() {
        let p = bump(1.0);
        for l in 0..=10 {
            let s = t_matrix(&p, l, 5.0, 1e-10).unwrap().s_matrix();
            assert!((s.norm() - 1.0).abs() < 1e-8, "l={l} |S|={}", s.norm());
        }
    }

    #[test]
    fn optical_theorem_and_parseval() {
        let a = partial_waves(&bump(1.0), 2.0, None, 1e-10).unwrap();
        assert!(!a.truncated);
        assert!(a.optical_theorem().relative_error < 1e-6);
        let b = partial_waves(&bump(0.5), 2.0, None, 1e-10).unwrap();
        let d = a.distance(&b).unwrap();
        assert!(d.parseval > 1e-6);
        assert!((d.parseval - d.quadrature).abs() < 1e-8 * d.parseval);
    }

    #[test]
    fn hankel_series_approaches_far_field() {
        let s = partial_waves(&bump(1.0), 2.0, None, 1e-10).unwrap();
        for r in [1e2, 1e3] {
            let t = 0.3;
            let u = s.scattered_field(r, t).unwrap();
            let lead = Complex64::new(0.0, s.k * r).exp() / r * s.amplitude(t);
            // the next term of the expansion is O(1/r^2)
            assert!((u - lead).norm() * r * r < 50.0, "r={r}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = bump(1.0);
        assert!(t_matrix(&p, 0, -1.0, 1e-10).is_err());
        assert!(far_field(&p, 2.0, [1.0, 1.0, 0.0], &[0.0], None, 1e-10).is_err());
        assert!(far_field(&p, 2.0, [1.0, 0.0, 0.0], &[1.5], None, 1e-10).is_err());
    }
}
