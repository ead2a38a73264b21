//! Radially symmetric refractive-index profiles and the Liouville change of
//! variables `xi = int_0^r sqrt(n)`, `z = n^{1/4} a` that turns the radial
//! equation into Schrödinger form with potential `p`.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{self, gauss_legendre, gl_integrate};

/// Profile family tags accepted by [`make_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFamily {
    ConstantOne,
    Bump,
    SumOfBumps,
}

impl ProfileFamily {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "constant_one" => Some(ProfileFamily::ConstantOne),
            "bump" => Some(ProfileFamily::Bump),
            "sum_of_bumps" => Some(ProfileFamily::SumOfBumps),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ProfileFamily::ConstantOne => "constant_one",
            ProfileFamily::Bump => "bump",
            ProfileFamily::SumOfBumps => "sum_of_bumps",
        }
    }
}

/// One term `c (1 - (r/a)^2)^3` supported on `r < a`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BumpTerm {
    c: f64,
    a: f64,
}

impl BumpTerm {
    /// `[n, n', n'', n''']` contribution at `r`.
    fn eval(&self, r: f64) -> [f64; 4] {
        if r >= self.a {
            return [0.0; 4];
        }
        self.eval_formula(r)
    }

    fn eval_formula(&self, r: f64) -> [f64; 4] {
        let (c, a2) = (self.c, self.a * self.a);
        let u = 1.0 - r * r / a2;
        [
            c * u * u * u,
            -6.0 * c * r * u * u / a2,
            -6.0 * c * u * u / a2 + 24.0 * c * r * r * u / (a2 * a2),
            72.0 * c * r * u / (a2 * a2) - 48.0 * c * r * r * r / (a2 * a2 * a2),
        ]
    }

    /// Taylor coefficients `(n0, n2, n4)` of the term at the origin.
    fn taylor0(&self) -> [f64; 3] {
        let a2 = self.a * self.a;
        [self.c, -3.0 * self.c / a2, 3.0 * self.c / (a2 * a2)]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    ConstantOne,
    Bumps(Vec<BumpTerm>),
    /// `n = value` on `[0, R]`, 1 beyond; not C², only for unit tests.
    #[allow(dead_code)]
    Uniform(f64),
}

/// A refractive index `n(r)` that equals 1 for `r >= R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefractiveProfile {
    radius: f64,
    family: ProfileFamily,
    params: Vec<f64>,
    kind: Kind,
}

/// Builds and validates a profile.
///
/// - `constant_one`: no parameters, `n = 1`.
/// - `bump`: `[c]`, `n = 1 + c (1 - (r/R)^2)^3` on `r < R`, requires `c > -1`.
/// - `sum_of_bumps`: `[c1, rho1, c2, rho2, ...]`, terms with support radius
///   `rho_i R`, `0 < rho_i <= 1`.
pub fn make_profile(family: ProfileFamily, radius: f64, params: &[f64]) -> Result<RefractiveProfile> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParams {
            reason: "radius must be positive and finite",
        });
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParams {
            reason: "parameters must be finite",
        });
    }
    let kind = match family {
        ProfileFamily::ConstantOne => {
            if !params.is_empty() {
                return Err(Error::InvalidParams {
                    reason: "constant_one takes no parameters",
                });
            }
            Kind::ConstantOne
        }
        ProfileFamily::Bump => {
            let [c] = params else {
                return Err(Error::InvalidParams {
                    reason: "bump takes exactly one parameter c",
                });
            };
            if !(*c > -1.0) {
                return Err(Error::InvalidParams {
                    reason: "bump needs c > -1 for n(0) > 0",
                });
            }
            Kind::Bumps(alloc::vec![BumpTerm { c: *c, a: radius }])
        }
        ProfileFamily::SumOfBumps => {
            if params.is_empty() || !params.len().is_multiple_of(2) {
                return Err(Error::InvalidParams {
                    reason: "sum_of_bumps takes pairs (c, rho)",
                });
            }
            let mut terms = Vec::with_capacity(params.len() / 2);
            for pair in params.chunks(2) {
                let rho = pair[1];
                if !(rho > 0.0 && rho <= 1.0) {
                    return Err(Error::InvalidParams {
                        reason: "sum_of_bumps needs 0 < rho <= 1",
                    });
                }
                terms.push(BumpTerm {
                    c: pair[0],
                    a: rho * radius,
                });
            }
            Kind::Bumps(terms)
        }
    };
    let profile = RefractiveProfile {
        radius,
        family,
        params: params.to_vec(),
        kind,
    };
    profile.validate()?;
    Ok(profile)
}

impl RefractiveProfile {
    /// `n = value` inside the support, 1 outside. Jumps at `R`, so only the
    /// Liouville map (which needs no smoothness) may be used with it.
    #[cfg(test)]
    pub(crate) fn uniform_unchecked(value: f64, radius: f64) -> Self {
        RefractiveProfile {
            radius,
            family: ProfileFamily::ConstantOne,
            params: alloc::vec![value],
            kind: Kind::Uniform(value),
        }
    }

    fn validate(&self) -> Result<()> {
        let samples = 2000;
        for i in 0..=samples {
            let r = self.radius * (i as f64) / (samples as f64);
            let v = self.n(r);
            if !(v > 0.0) {
                return Err(Error::InvalidParams {
                    reason: "n(r) must stay positive",
                });
            }
        }
        // C² matching to the exterior, one-sided limits at R
        let inside = self.eval_inside(self.radius);
        let scale = 1.0 + self.params.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        let tol = 1e-12 * scale;
        if (inside[0] - 1.0).abs() > tol
            || inside[1].abs() > tol / self.radius
            || inside[2].abs() > tol / (self.radius * self.radius)
        {
            return Err(Error::InvalidParams {
                reason: "n, n', n'' must match the exterior at r = R",
            });
        }
        Ok(())
    }

    fn eval_inside(&self, r: f64) -> [f64; 4] {
        self.sum_terms(r, false)
    }

    /// With `left` set, each term is continued up to and including its
    /// support edge, which gives one-sided limits from below.
    fn sum_terms(&self, r: f64, left: bool) -> [f64; 4] {
        match &self.kind {
            Kind::ConstantOne => [1.0, 0.0, 0.0, 0.0],
            Kind::Uniform(v) => [*v, 0.0, 0.0, 0.0],
            Kind::Bumps(terms) => {
                let mut out = [1.0, 0.0, 0.0, 0.0];
                for t in terms {
                    let e = if left && r <= t.a { t.eval_formula(r) } else { t.eval(r) };
                    for i in 0..4 {
                        out[i] += e[i];
                    }
                }
                out
            }
        }
    }

    /// `[n, n', n'', n''']` at `r >= 0`.
    pub fn eval(&self, r: f64) -> [f64; 4] {
        if r >= self.radius {
            [1.0, 0.0, 0.0, 0.0]
        } else {
            self.eval_inside(r)
        }
    }

    /// Like [`Self::eval`] but as limits from below; differs only in the
    /// third derivative at support edges.
    pub fn eval_left(&self, r: f64) -> [f64; 4] {
        if r > self.radius {
            [1.0, 0.0, 0.0, 0.0]
        } else {
            self.sum_terms(r, true)
        }
    }

    pub fn n(&self, r: f64) -> f64 {
        self.eval(r)[0]
    }

    pub fn dn(&self, r: f64) -> f64 {
        self.eval(r)[1]
    }

    pub fn d2n(&self, r: f64) -> f64 {
        self.eval(r)[2]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn family(&self) -> ProfileFamily {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// True when `n == 1` identically.
    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            Kind::ConstantOne => true,
            Kind::Uniform(v) => *v == 1.0,
            Kind::Bumps(t) => t.iter().all(|b| b.c == 0.0),
        }
    }

    /// Taylor coefficients `(n0, n2, n4)` with `n(r) = n0 + n2 r^2 + n4 r^4 + ...`.
    pub fn taylor0(&self) -> [f64; 3] {
        match &self.kind {
            Kind::ConstantOne => [1.0, 0.0, 0.0],
            Kind::Uniform(v) => [*v, 0.0, 0.0],
            Kind::Bumps(terms) => {
                let mut out = [1.0, 0.0, 0.0];
                for t in terms {
                    let e = t.taylor0();
                    for i in 0..3 {
                        out[i] += e[i];
                    }
                }
                out
            }
        }
    }

    /// Radii where the profile's formula changes, sorted, excluding 0.
    fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = match &self.kind {
            Kind::Bumps(terms) => terms.iter().map(|t| t.a).filter(|a| *a < self.radius).collect(),
            _ => Vec::new(),
        };
        v.push(self.radius);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// `n''/(4n^2) - (5/16) n'^2/n^3` at `r`, the part of `p` that does not
    /// depend on `l`.
    pub fn shape_potential(&self, r: f64) -> f64 {
        let [n, n1, n2, _] = self.eval(r);
        n2 / (4.0 * n * n) - 5.0 / 16.0 * n1 * n1 / (n * n * n)
    }

    /// `d/dr` of [`Self::shape_potential`], as a limit from below.
    pub fn shape_potential_dr(&self, r: f64) -> f64 {
        let [n, n1, n2, n3] = self.eval_left(r);
        let (n_2, n_3, n_4) = (n * n, n * n * n, n * n * n * n);
        n3 / (4.0 * n_2) - n2 * n1 / (2.0 * n_3) - 5.0 / 8.0 * n1 * n2 / n_3 + 15.0 / 16.0 * n1 * n1 * n1 / n_4
    }
}

/// Radius below which `q` is evaluated from its Taylor expansion, as a
/// fraction of `R`.
const SERIES_SWITCH: f64 = 1e-3;
const PANELS: usize = 64;
const GL_POINTS: usize = 20;

/// The Liouville map of one profile at one angular order.
#[derive(Debug, Clone)]
pub struct LiouvilleFrame {
    profile: RefractiveProfile,
    l: usize,
    b: f64,
    r_nodes: Vec<f64>,
    xi_nodes: Vec<f64>,
    /// `int_0^{xi(r_i)} p` at the nodes; only filled for `l = 0`.
    q_nodes: Vec<f64>,
    rule: (Vec<f64>, Vec<f64>),
}

/// Builds the frame: `B` and the node table of `xi(r)`, and for `l = 0`
/// the cumulative integral `Q` of `p`.
pub fn liouville(profile: &RefractiveProfile, l: usize) -> Result<LiouvilleFrame> {
    let r_big = profile.radius;
    let mut r_nodes: Vec<f64> = (0..=PANELS).map(|i| r_big * (i as f64) / (PANELS as f64)).collect();
    for bp in profile.breakpoints() {
        if !r_nodes.iter().any(|r| (r - bp).abs() < 1e-12 * r_big) {
            r_nodes.push(bp);
        }
    }
    r_nodes.sort_by(f64::total_cmp);

    let sqrt_n = |r: f64| profile.n(r).sqrt();
    let mut xi_nodes = Vec::with_capacity(r_nodes.len());
    xi_nodes.push(0.0);
    let mut acc = 0.0;
    for w in r_nodes.windows(2) {
        acc += quad::integrate(sqrt_n, w[0], w[1], 1e-16 * r_big, 1e-14)?.value;
        xi_nodes.push(acc);
    }
    let whole = quad::integrate(sqrt_n, 0.0, r_big, 1e-14 * r_big, 1e-12)?;
    let b = acc;
    if (whole.value - b).abs() > 1e-11 * b {
        return Err(Error::QuadratureFailure {
            estimate: (whole.value - b).abs(),
            intervals: whole.intervals,
        });
    }

    let mut q_nodes = Vec::new();
    if l == 0 {
        let integrand = |r: f64| profile.shape_potential(r) * profile.n(r).sqrt();
        q_nodes.push(0.0);
        let mut acc = 0.0;
        for w in r_nodes.windows(2) {
            acc += quad::integrate(integrand, w[0], w[1], 1e-16, 1e-14)?.value;
            q_nodes.push(acc);
        }
    }

    Ok(LiouvilleFrame {
        profile: profile.clone(),
        l,
        b,
        r_nodes,
        xi_nodes,
        q_nodes,
        rule: gauss_legendre(GL_POINTS),
    })
}

impl LiouvilleFrame {
    pub fn profile(&self) -> &RefractiveProfile {
        &self.profile
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Liouville length `B = int_0^R sqrt(n)`.
    pub fn b(&self) -> f64 {
        self.b
    }

    fn panel_of_r(&self, r: f64) -> usize {
        let i = self.r_nodes.partition_point(|x| *x <= r);
        i.saturating_sub(1).min(self.r_nodes.len() - 2)
    }

    /// `xi(r)`; beyond `R` the map continues as `B + (r - R)`.
    pub fn xi_of_r(&self, r: f64) -> f64 {
        let r_big = self.profile.radius;
        if r >= r_big {
            return self.b + (r - r_big);
        }
        if r <= 0.0 {
            return 0.0;
        }
        let i = self.panel_of_r(r);
        let r0 = self.r_nodes[i];
        self.xi_nodes[i] + gl_integrate(|s| self.profile.n(s).sqrt(), r0, r, &self.rule)
    }

    /// Inverse of [`Self::xi_of_r`].
    pub fn r_of_xi(&self, xi: f64) -> f64 {
        let r_big = self.profile.radius;
        if xi >= self.b {
            return r_big + (xi - self.b);
        }
        if xi <= 0.0 {
            return 0.0;
        }
        let i = self
            .xi_nodes
            .partition_point(|x| *x <= xi)
            .saturating_sub(1)
            .min(self.xi_nodes.len() - 2);
        let (x0, x1) = (self.xi_nodes[i], self.xi_nodes[i + 1]);
        let (r0, r1) = (self.r_nodes[i], self.r_nodes[i + 1]);
        let mut r = r0 + (r1 - r0) * (xi - x0) / (x1 - x0);
        for _ in 0..20 {
            let f = self.xi_of_r(r) - xi;
            let dr = f / self.profile.n(r).sqrt();
            r = (r - dr).clamp(r0, r1);
            if dr.abs() <= 1e-16 * r_big {
                break;
            }
        }
        r
    }

    /// `p` as a function of `r`.
    pub fn p_of_r(&self, r: f64) -> f64 {
        let lf = (self.l * (self.l + 1)) as f64;
        let shape = self.profile.shape_potential(r);
        if lf == 0.0 {
            shape
        } else {
            shape + lf / (r * r * self.profile.n(r))
        }
    }

    /// `q = p - l(l+1)/xi^2` as a function of `r`; bounded at the origin.
    pub fn q_of_r(&self, r: f64) -> f64 {
        let lf = (self.l * (self.l + 1)) as f64;
        let shape = self.profile.shape_potential(r);
        if lf == 0.0 {
            return shape;
        }
        if r < SERIES_SWITCH * self.profile.radius {
            let [n0, n2, n4] = self.profile.taylor0();
            let alpha = n2 / n0;
            let beta = n4 / n0;
            let a = alpha / 6.0;
            let bc = (beta / 2.0 - alpha * alpha / 8.0) / 5.0;
            let lead = -alpha + 2.0 * a;
            let next = alpha * alpha - beta - 3.0 * a * a + 2.0 * bc;
            return shape + lf * (lead + next * r * r) / n0;
        }
        let xi = self.xi_of_r(r);
        shape + lf / (r * r * self.profile.n(r)) - lf / (xi * xi)
    }

    /// `p(xi)`.
    pub fn p(&self, xi: f64) -> f64 {
        self.p_of_r(self.r_of_xi(xi))
    }

    /// `q(xi)`.
    pub fn q(&self, xi: f64) -> f64 {
        self.q_of_r(self.r_of_xi(xi))
    }

    /// `dp/dxi` at `xi` (limit from below), for `l = 0`.
    pub fn dp_dxi(&self, xi: f64) -> Result<f64> {
        self.require_l0()?;
        let r = self.r_of_xi(xi);
        Ok(self.profile.shape_potential_dr(r) / self.profile.n(r).sqrt())
    }

    fn require_l0(&self) -> Result<()> {
        if self.l != 0 {
            return Err(Error::InvalidArgument {
                module: "media",
                reason: "Q is defined on frames built at l = 0",
            });
        }
        Ok(())
    }

    /// `Q(xi) = int_0^xi p(s) ds` for a frame built at `l = 0`.
    pub fn big_q(&self, xi: f64) -> Result<f64> {
        self.require_l0()?;
        if xi >= self.b {
            return Ok(*self.q_nodes.last().unwrap_or(&0.0));
        }
        if xi <= 0.0 {
            return Ok(0.0);
        }
        let r = self.r_of_xi(xi);
        let i = self.panel_of_r(r);
        let r0 = self.r_nodes[i];
        let part = gl_integrate(
            |s| self.profile.shape_potential(s) * self.profile.n(s).sqrt(),
            r0,
            r,
            &self.rule,
        );
        Ok(self.q_nodes[i] + part)
    }

    /// `Q(B)` from the integrated-by-parts form `(1/16) int_0^B n'^2/n^3 dxi`,
    /// with `n'` the `r`-derivative.
    pub fn big_q_by_parts(&self) -> Result<f64> {
        let pr = &self.profile;
        let v = quad::integrate(
            |r| {
                let [n, n1, _, _] = pr.eval(r);
                n1 * n1 / (n * n * n.sqrt())
            },
            0.0,
            pr.radius,
            1e-16,
            1e-13,
        )?;
        Ok(v.value / 16.0)
    }

    /// `int_0^xi p(s)^2 ds` at `l = 0`.
    pub fn p_squared_integral(&self, xi: f64) -> Result<f64> {
        self.require_l0()?;
        let r = self.r_of_xi(xi.min(self.b));
        let v = quad::integrate(
            |s| {
                let p = self.profile.shape_potential(s);
                p * p * self.profile.n(s).sqrt()
            },
            0.0,
            r,
            1e-16,
            1e-13,
        )?;
        Ok(v.value)
    }

    /// `int_0^xi |q(s)| ds` by Gauss–Legendre panels, used by envelope
    /// functions.
    pub fn abs_q_integral(&self, xi: f64) -> f64 {
        let r_end = self.r_of_xi(xi.min(self.b));
        let mut total = 0.0;
        for w in self.r_nodes.windows(2) {
            let (a, b) = (w[0], w[1].min(r_end));
            if b <= a {
                break;
            }
            total += gl_integrate(|s| self.q_of_r(s).abs() * self.profile.n(s).sqrt(), a, b, &self.rule);
        }
        total
    }
}
