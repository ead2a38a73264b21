//! Adaptive explicit Runge–Kutta integration of complex first-order systems
//! with the Dormand–Prince 8(5,3) pair.
//!
//! States are fixed-size arrays of [`Complex64`]. The integrator stops
//! exactly on caller-supplied checkpoints instead of interpolating, and lets
//! the system rescale its state after every accepted step so linear problems
//! with exponentially growing solutions can carry the growth in a separate
//! logarithm.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        5.260_015_195_876_773E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.972_505_698_453_79E-2,
        5.917_517_095_361_37E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.958_758_547_680_685E-2,
        0.0,
        8.876_275_643_042_054E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.413_651_341_592_667E-1,
        0.0,
        -8.845_494_793_282_861E-1,
        9.248_340_032_617_92E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.703_703_703_703_703_5E-2,
        0.0,
        0.0,
        1.708_286_087_294_738_6E-1,
        1.254_676_875_668_224_2E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375E-2,
        0.0,
        0.0,
        1.702_522_110_195_440_5E-1,
        6.021_653_898_045_596E-2,
        -1.7578125E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709_200_011_850_479E-2,
        0.0,
        0.0,
        1.703_839_257_122_399_8E-1,
        1.072_620_304_463_732_8E-1,
        -1.531_943_774_862_440_2E-2,
        8.273_789_163_814_023E-3,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241_109_587_160_757E-1,
        0.0,
        0.0,
        -3.360_892_629_446_941_4,
        -8.682_193_468_417_26E-1,
        2.759_209_969_944_671E1,
        2.015_406_755_047_789_4E1,
        -4.348_988_418_106_996E1,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.776_625_364_382_643_4E-1,
        0.0,
        0.0,
        -2.488_114_619_971_667_7,
        -5.902_908_268_368_43E-1,
        2.123_005_144_818_119_3E1,
        1.527_923_363_288_242_3E1,
        -3.328_821_096_898_486E1,
        -2.033_120_170_850_862_7E-2,
        0.0,
        0.0,
        0.0,
    ],
    [
        -9.371_424_300_859_873E-1,
        0.0,
        0.0,
        5.186_372_428_844_064,
        1.091_437_348_996_729_5,
        -8.149_787_010_746_927,
        -1.852_006_565_999_696E1,
        2.273_948_709_935_050_5E1,
        2.493_605_552_679_652_3,
        -3.046_764_471_898_219_6,
        0.0,
        0.0,
    ],
    [
        2.273_310_147_516_538,
        0.0,
        0.0,
        -1.053_449_546_673_725E1,
        -2.000_872_058_224_862_5,
        -1.795_893_186_311_88E1,
        2.794_888_452_941_996E1,
        -2.858_998_277_135_023_5,
        -8.872_856_933_530_63,
        1.236_056_717_579_430_3E1,
        6.433_927_460_157_636E-1,
        0.0,
    ],
];
const C: [f64; 12] = [
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25E+00,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6E+00,
    8.571_428_571_428_571E-1,
    1.0,
];
const B: [f64; 12] = [
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];
const ER: [f64; 12] = [
    1.312_004_499_419_488E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502E-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6E-1,
    3.341_791_187_130_175E-1,
    8.192_320_648_511_571E-2,
    -2.235_530_786_388_629_4E-2,
];

const BHH: [f64; 3] = [
    2.440_944_881_889_764E-1,
    7.338_466_882_816_118E-1,
    2.205_882_352_941_176_6E-2,
];

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[Complex64; N]) -> [Complex64; N];

    /// Magnitude against which the relative tolerance of each component is
    /// measured. Defaults to `|y_i|`.
    fn error_scale(&self, _t: f64, y: &[Complex64; N]) -> [f64; N] {
        let mut s = [0.0; N];
        for (o, v) in s.iter_mut().zip(y) {
            *o = v.norm();
        }
        s
    }

    /// Called after each accepted step; may divide the state by a factor and
    /// return the natural log of that factor.
    fn renormalize(&self, _t: f64, _y: &mut [Complex64; N]) -> f64 {
        0.0
    }
}

/// State recorded at a checkpoint; the true state is `y * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint<const N: usize> {
    pub t: f64,
    pub y: [Complex64; N],
    pub log_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub points: Vec<Checkpoint<N>>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dop853 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest step allowed; `f64::INFINITY` for no limit.
    pub h_max: f64,
}

impl Dop853 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dop853 {
            rtol,
            atol,
            max_steps: 200_000,
            h_max: f64::INFINITY,
        }
    }

    fn weights<const N: usize>(&self, a: &[f64; N], b: &[f64; N]) -> [f64; N] {
        let mut sk = [0.0; N];
        for i in 0..N {
            sk[i] = self.atol + self.rtol * a[i].max(b[i]);
        }
        sk
    }

    fn initial_step<S: OdeSystem<N>, const N: usize>(
        &self,
        sys: &S,
        t: f64,
        y: &[Complex64; N],
        f0: &[Complex64; N],
        span: f64,
    ) -> f64 {
        let sc = sys.error_scale(t, y);
        let sk = self.weights(&sc, &sc);
        let norm = |v: &[Complex64; N]| -> f64 {
            let s: f64 = v.iter().zip(&sk).map(|(x, w)| (x.norm() / w).powi(2)).sum();
            (s / N as f64).sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let mut h0 = if d0 < 1e-10 || d1 < 1e-10 {
            1e-6 * span
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span).min(self.h_max);
        let mut y1 = *y;
        for i in 0..N {
            y1[i] += f0[i] * h0;
        }
        let f1 = sys.rhs(t + h0, &y1);
        let mut diff = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = norm(&diff) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 {
            (1e-6f64).max(h0 * 1e-3)
        } else {
            (0.01 / dm).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(span).min(self.h_max)
    }

    /// Integrates from `(t0, y0)` through the increasing `checkpoints`,
    /// recording the state on each of them. The last checkpoint is the end
    /// of the integration.
    pub fn integrate<S: OdeSystem<N>, const N: usize>(
        &self,
        sys: &S,
        t0: f64,
        y0: [Complex64; N],
        checkpoints: &[f64],
    ) -> Result<Trajectory<N>> {
        let mut out = Trajectory {
            points: Vec::with_capacity(checkpoints.len()),
            accepted: 0,
            rejected: 0,
        };
        let Some(&t_end) = checkpoints.last() else {
            return Ok(out);
        };
        if checkpoints.windows(2).any(|w| !(w[1] > w[0])) || !(checkpoints[0] >= t0) {
            return Err(Error::InvalidArgument {
                module: "ode",
                reason: "checkpoints must increase from the start point",
            });
        }
        let mut t = t0;
        let mut y = y0;
        let mut log_scale = 0.0;
        let mut next = 0;
        while next < checkpoints.len() && checkpoints[next] == t0 {
            out.points.push(Checkpoint { t, y, log_scale });
            next += 1;
        }
        if next == checkpoints.len() {
            return Ok(out);
        }

        let mut k = [[Complex64::new(0.0, 0.0); N]; 12];
        k[0] = sys.rhs(t, &y);
        let mut h = self.initial_step(sys, t, &y, &k[0], t_end - t0);
        let mut last_rejected = false;

        loop {
            if out.accepted + out.rejected >= self.max_steps {
                return Err(Error::StiffnessFailure { at: t });
            }
            let target = checkpoints[next];
            let mut h_step = h;
            let mut hits = false;
            if t + h_step >= target - 1e-13 * (target - t0).abs().max(1.0) {
                h_step = target - t;
                hits = true;
            }
            if h_step <= 1e-14 * t.abs().max(1e-300) || h_step <= 0.0 {
                return Err(Error::StiffnessFailure { at: t });
            }

            for s in 1..12 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += kj[i] * (a * h_step);
                        }
                    }
                }
                k[s] = sys.rhs(t + C[s] * h_step, &ys);
            }
            let mut bsum = [Complex64::new(0.0, 0.0); N];
            let mut e5 = [Complex64::new(0.0, 0.0); N];
            for (j, kj) in k.iter().enumerate() {
                for i in 0..N {
                    bsum[i] += kj[i] * B[j];
                    e5[i] += kj[i] * ER[j];
                }
            }
            let mut y_new = y;
            for i in 0..N {
                y_new[i] += bsum[i] * h_step;
            }
            let finite = y_new.iter().all(|v| v.re.is_finite() && v.im.is_finite());

            let err = if finite {
                let sk = self.weights(&sys.error_scale(t, &y), &sys.error_scale(t + h_step, &y_new));
                let (mut err5, mut err3) = (0.0, 0.0);
                for i in 0..N {
                    let e3 = bsum[i] - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
                    err5 += (e5[i].norm() / sk[i]).powi(2);
                    err3 += (e3.norm() / sk[i]).powi(2);
                }
                let mut deno = err5 + 0.01 * err3;
                if deno <= 0.0 {
                    deno = 1.0;
                }
                h_step.abs() * err5 / (deno * N as f64).sqrt()
            } else {
                f64::INFINITY
            };

            let fac11 = err.powf(1.0 / 8.0);
            if err <= 1.0 {
                out.accepted += 1;
                t = if hits { target } else { t + h_step };
                y = y_new;
                log_scale += sys.renormalize(t, &mut y);
                k[0] = sys.rhs(t, &y);
                let fac = (fac11 / 0.9).clamp(1.0 / 6.0, 3.0);
                let mut h_new = h_step / fac;
                if last_rejected {
                    h_new = h_new.min(h_step);
                }
                last_rejected = false;
                // a step shortened to land on a checkpoint says nothing
                // about the step the solution allows
                h = if hits { h.max(h_new) } else { h_new }.min(self.h_max);
                if hits {
                    out.points.push(Checkpoint { t, y, log_scale });
                    next += 1;
                    if next == checkpoints.len() {
                        return Ok(out);
                    }
                }
            } else {
                out.rejected += 1;
                last_rejected = true;
                h = if finite {
                    h_step / (fac11 / 0.9).min(3.0)
                } else {
                    0.25 * h_step
                };
            }
        }
    }
}
