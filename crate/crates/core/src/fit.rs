//! Least-squares sinusoid fit used to characterize interference fringes.

use core::f64::consts::TAU;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

/// `y = offset + amplitude * cos(frequency * x + phase)` with `amplitude >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub frequency: f64,
    pub rms_residual: f64,
}

impl SinusoidFit {
    pub fn period(&self) -> f64 {
        TAU / self.frequency
    }

    /// `(max - min) / (max + min)` of the fitted curve.
    pub fn visibility(&self) -> f64 {
        self.amplitude / self.offset
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.offset + self.amplitude * (self.frequency * x + self.phase).cos()
    }

    /// Abscissa of the first maximum at or after `0`.
    pub fn first_maximum(&self) -> f64 {
        crate::phase::rem_euclid(-self.phase / self.frequency, self.period())
    }
}

/// Linear least squares for fixed `frequency`; returns
/// `(offset, a, b, sum of squared residuals)` of `offset + a cos + b sin`.
fn linear_fit(xs: &[f64], ys: &[f64], frequency: f64) -> Option<(f64, f64, f64, f64)> {
    let mut m = [[0.0f64; 3]; 3];
    let mut v = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let (s, c) = (frequency * x).sin_cos();
        let basis = [1.0, c, s];
        for i in 0..3 {
            v[i] += basis[i] * y;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    let sol = solve3(m, v)?;
    let ssr = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let (s, c) = (frequency * x).sin_cos();
            let r = y - (sol[0] + sol[1] * c + sol[2] * s);
            r * r
        })
        .sum();
    Some((sol[0], sol[1], sol[2], ssr))
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = v[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Fit a sinusoid with free frequency searched in `[f_lo, f_hi]`: coarse scan
/// of the residual followed by golden-section refinement.
pub fn fit_sinusoid(xs: &[f64], ys: &[f64], f_lo: f64, f_hi: f64) -> Option<SinusoidFit> {
    if xs.len() != ys.len() || xs.len() < 4 || !(f_hi > f_lo) || !(f_lo > 0.0) {
        return None;
    }
    let cost = |f: f64| linear_fit(xs, ys, f).map_or(f64::INFINITY, |r| r.3);
    let coarse = 400;
    let step = (f_hi - f_lo) / coarse as f64;
    let mut best = f_lo;
    let mut best_cost = f64::INFINITY;
    for k in 0..=coarse {
        let f = f_lo + k as f64 * step;
        let c = cost(f);
        if c < best_cost {
            best_cost = c;
            best = f;
        }
    }
    let (mut a, mut b) = ((best - step).max(f_lo), (best + step).min(f_hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut c1, mut c2) = (cost(x1), cost(x2));
    for _ in 0..200 {
        if c1 < c2 {
            b = x2;
            x2 = x1;
            c2 = c1;
            x1 = b - g * (b - a);
            c1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            c1 = c2;
            x2 = a + g * (b - a);
            c2 = cost(x2);
        }
        if (b - a).abs() < 1e-14 * best.abs().max(1.0) {
            break;
        }
    }
    fit_fixed_frequency(xs, ys, 0.5 * (a + b))
}

/// Sinusoid fit at a known frequency.
pub fn fit_fixed_frequency(xs: &[f64], ys: &[f64], frequency: f64) -> Option<SinusoidFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let (offset, a, b, ssr) = linear_fit(xs, ys, frequency)?;
    // a cos + b sin = R cos(fx + phase) with R cos(phase) = a, R sin(phase) = -b
    Some(SinusoidFit {
        offset,
        amplitude: a.hypot(b),
        phase: (-b).atan2(a),
        frequency,
        rms_residual: (ssr / xs.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn recovers_known_sinusoid() {
        let xs: Vec<f64> = (0..16).map(|k| TAU * k as f64 / 16.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 1.0 + 0.8 * (1.03 * x - 0.4).cos()).collect();
        let fit = fit_sinusoid(&xs, &ys, 0.5, 2.0).unwrap();
        assert!((fit.frequency - 1.03).abs() < 1e-8, "{fit:?}");
        assert!((fit.offset - 1.0).abs() < 1e-8);
        assert!((fit.visibility() - 0.8).abs() < 1e-8);
        assert!((fit.phase + 0.4).abs() < 1e-7);
    }

    #[test]
    fn cos_squared_fringe() {
        // 2 cos^2(x/2 + c) = 1 + cos(x + 2c): full visibility, period 2 pi
        let xs: Vec<f64> = (0..16).map(|k| TAU * k as f64 / 16.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.0 * (0.5 * x + 0.3).cos().powi(2)).collect();
        let fit = fit_sinusoid(&xs, &ys, 0.5, 2.0).unwrap();
        assert!((fit.period() - TAU).abs() < 1e-8);
        assert!((fit.visibility() - 1.0).abs() < 1e-10);
        assert!((fit.first_maximum() - (TAU - 0.6)).abs() < 1e-7);
    }
}
