//! Small dense least-squares fits (modified Gram–Schmidt QR).

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Coefficients of a linear least-squares fit with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit<const P: usize> {
    pub coef: [f64; P],
    pub stderr: [f64; P],
    /// Root-mean-square residual.
    pub rms: f64,
}

/// Minimises `|X c - y|` for the design rows `x`.
pub fn least_squares<const P: usize>(x: &[[f64; P]], y: &[f64]) -> Result<LinearFit<P>> {
    let m = x.len();
    if m != y.len() || m < P || P == 0 {
        return Err(Error::FitFailure {
            reason: "not enough samples for the requested fit",
        });
    }
    // column-major copy of X, reduced in place to Q
    let mut q: Vec<Vec<f64>> = (0..P).map(|j| x.iter().map(|row| row[j]).collect()).collect();
    let mut r = [[0.0; P]; P];
    for j in 0..P {
        let original = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (v, w) in q[j].iter_mut().zip(&qi) {
                *v -= d * w;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-12 * original) || !norm.is_finite() {
            return Err(Error::FitFailure {
                reason: "design matrix is rank deficient",
            });
        }
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut qty = [0.0; P];
    for j in 0..P {
        qty[j] = q[j].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    let mut coef = [0.0; P];
    for j in (0..P).rev() {
        let mut s = qty[j];
        for i in j + 1..P {
            s -= r[j][i] * coef[i];
        }
        coef[j] = s / r[j][j];
    }
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let pred: f64 = row.iter().zip(&coef).map(|(a, b)| a * b).sum();
            (yi - pred).powi(2)
        })
        .sum();
    let dof = (m - P).max(1) as f64;
    let sigma2 = rss / dof;
    // diag((R^T R)^{-1}) from R^{-1}
    let mut rinv = [[0.0; P]; P];
    for j in 0..P {
        rinv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for t in i + 1..=j {
                s += r[i][t] * rinv[t][j];
            }
            rinv[i][j] = -s / r[i][i];
        }
    }
    let mut stderr = [0.0; P];
    for i in 0..P {
        let v: f64 = (0..P).map(|j| rinv[i][j] * rinv[i][j]).sum();
        stderr[i] = (sigma2 * v).sqrt();
    }
    Ok(LinearFit {
        coef,
        stderr,
        rms: (rss / m as f64).sqrt(),
    })
}

/// Straight-line fit `y = slope x + intercept`; returns `(slope, intercept,
/// slope standard error)`.
pub fn line_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let rows: Vec<[f64; 2]> = x.iter().map(|v| [*v, 1.0]).collect();
    let f = least_squares(&rows, y)?;
    Ok((f.coef[0], f.coef[1], f.stderr[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (s, i, e) = line_fit(&x, &y).unwrap();
        assert!((s - 3.0).abs() < 1e-14 && (i + 1.0).abs() < 1e-13 && e < 1e-12);
    }

    #[test]
    fn three_parameter_recovery() {
        let ys: Vec<f64> = (0..40).map(|i| 5.0 * 1.1f64.powi(i)).collect();
        let rows: Vec<[f64; 3]> = ys.iter().map(|y| [*y, y.ln(), 1.0]).collect();
        let vals: Vec<f64> = ys.iter().map(|y| 2.0 * y - 1.0 * y.ln() + 0.3).collect();
        let f = least_squares(&rows, &vals).unwrap();
        assert!((f.coef[0] - 2.0).abs() < 1e-10);
        assert!((f.coef[1] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn rank_deficient_is_an_error() {
        let rows = [[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        assert!(least_squares(&rows, &[1.0, 2.0, 3.0]).is_err());
    }
}
