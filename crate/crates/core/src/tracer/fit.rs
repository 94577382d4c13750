//! Tangent fits `θ(r) - ω̂ ≈ C r^α̂` near the origin.

use serde::Serialize;

use crate::angle;

/// Deviations below this are treated as an exact ray.
pub const EXACT_RAY: f64 = 1e-10;

const MAX_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentFit {
    /// Limit angle of the curve at the origin, in `(-π, π]`.
    pub omega_hat: f64,
    /// Exponent of the approach to the ray; `None` when the curve lies on the
    /// ray to within [`EXACT_RAY`].
    pub alpha_hat: Option<f64>,
    /// Number of samples in the fitting window.
    pub window: usize,
}

/// Least squares in a Chebyshev basis on the window, via modified
/// Gram-Schmidt. Returns the fitted polynomial evaluated at `x = at`.
fn chebyshev_fit_at(xs: &[f64], ys: &[f64], degree: usize, at: f64) -> f64 {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
            (l.min(x), h.max(x))
        });
    let map = |x: f64| {
        if hi > lo {
            (2.0 * x - lo - hi) / (hi - lo)
        } else {
            0.0
        }
    };
    let basis = |u: f64| {
        let mut t = vec![1.0, u];
        while t.len() <= degree {
            let n = t.len();
            t.push(2.0 * u * t[n - 1] - t[n - 2]);
        }
        t.truncate(degree + 1);
        t
    };
    let cols = degree + 1;
    let mut q: Vec<Vec<f64>> = (0..cols)
        .map(|j| xs.iter().map(|&x| basis(map(x))[j]).collect())
        .collect();
    let mut rmat = vec![vec![0.0; cols]; cols];
    for j in 0..cols {
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            rmat[i][j] = dot;
            let qi = q[i].clone();
            for (v, w) in q[j].iter_mut().zip(&qi) {
                *v -= dot * w;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        rmat[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q
        .iter()
        .map(|col| col.iter().zip(ys).map(|(a, b)| a * b).sum())
        .collect();
    let mut coef = vec![0.0; cols];
    for j in (0..cols).rev() {
        let s: f64 = ((j + 1)..cols).map(|l| rmat[j][l] * coef[l]).sum();
        coef[j] = (qty[j] - s) / rmat[j][j];
    }
    basis(map(at)).iter().zip(&coef).map(|(b, c)| b * c).sum()
}

/// Slope of the least-squares line through `(x, y)`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits a curve given as `(r, θ)` samples. Uses the samples within a
/// factor ten of the smallest radius, or the eight smallest if that window
/// is too thin. `None` with fewer than three samples.
pub fn fit_tangent(samples: &[(f64, f64)]) -> Option<TangentFit> {
    if samples.len() < 3 {
        return None;
    }
    let r_small = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let mut window: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|s| s.0 <= 10.0 * r_small * (1.0 + 1e-12))
        .collect();
    if window.len() < 4 {
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        sorted.truncate(8);
        window = sorted;
    }
    // unwrap around the innermost sample
    let anchor = window
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("window is nonempty")
        .1;
    let rs: Vec<f64> = window.iter().map(|s| s.0).collect();
    let ts: Vec<f64> = window
        .iter()
        .map(|s| anchor + angle::wrap(s.1 - anchor))
        .collect();
    let degree = MAX_DEGREE.min(window.len() - 2);
    let omega_raw = chebyshev_fit_at(&rs, &ts, degree, 0.0);
    let dev: Vec<f64> = ts.iter().map(|t| t - omega_raw).collect();
    let max_dev = dev.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let alpha_hat = if max_dev <= EXACT_RAY {
        None
    } else {
        let (lx, ly): (Vec<f64>, Vec<f64>) = rs
            .iter()
            .zip(&dev)
            .filter(|(_, d)| d.abs() > 1e-3 * max_dev)
            .map(|(r, d)| (r.ln(), d.abs().ln()))
            .unzip();
        (lx.len() >= 2).then(|| slope(&lx, &ly))
    };
    Some(TangentFit {
        omega_hat: angle::wrap(omega_raw),
        alpha_hat,
        window: window.len(),
    })
}
