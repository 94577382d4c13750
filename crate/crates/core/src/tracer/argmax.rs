//! Global maximizers of `θ ↦ |p(re^{iθ})|^2` on one circle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{TraceConfig, TraceError};
use crate::angle;
use crate::modulus::{direct_mod2, expand, ModulusExpansion};
use crate::poly::Polynomial;

/// Largest grid the adaptive refinement will use.
pub const MAX_GRID: usize = 1 << 16;

/// Bisection-safeguarded Newton stops once steps fall below this.
const STEP_FLOOR: f64 = 4.0 * f64::EPSILON;

/// A polynomial with its modulus expansion, ready for repeated circle scans.
#[derive(Debug, Clone)]
pub struct CircleProblem {
    poly: Polynomial,
    expansion: ModulusExpansion,
}

/// One global maximizer on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleMax {
    pub theta: f64,
    pub mod2: f64,
    /// θ-dependent part of `mod2`; the quantity compared between maximizers.
    pub angular: f64,
}

impl CircleProblem {
    pub fn new(poly: &Polynomial) -> Self {
        Self {
            poly: poly.clone(),
            expansion: expand(poly),
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn expansion(&self) -> &ModulusExpansion {
        &self.expansion
    }

    /// θ-dependent part of `|p|^2` on a uniform grid starting at θ = 0.
    ///
    /// Uses `|c + g|^2 - Λ = 2 Re(c̄ g) + (|g|^2 - Σ_{ℓ≥1} |a_ℓ|^2 r^{2ℓ})`
    /// with Horner for `g = p - c`, which is `O(deg)` per point instead of
    /// the `O(deg^2)` of the expansion. Only used for seeding.
    pub fn angular_grid(&self, r: f64, grid: usize) -> Vec<f64> {
        let coeffs = self.poly.coeffs();
        let c0 = coeffs[0];
        let tail_radial: f64 = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| a.norm_sqr() * r.powi(2 * n as i32))
            .sum();
        (0..grid)
            .map(|i| {
                let z = Complex64::from_polar(r, TAU * i as f64 / grid as f64);
                let g = coeffs[1..]
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
                    * z;
                2.0 * (c0.conj() * g).re + (g.norm_sqr() - tail_radial)
            })
            .collect()
    }
}

fn grid_theta(i: usize, grid: usize) -> f64 {
    TAU * i as f64 / grid as f64
}

/// Indices of strict-left local maxima on a cyclic grid.
fn grid_peaks(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] > prev && values[i] >= next
        })
        .collect()
}

fn crowded(peaks: &[usize], grid: usize) -> bool {
    if peaks.len() < 2 {
        return false;
    }
    let mut gaps: Vec<usize> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(peaks[0] + grid - peaks[peaks.len() - 1]);
    gaps.into_iter().any(|g| g <= 3)
}

/// Grid values and peak indices, doubling the grid while peaks crowd.
fn scan(problem: &CircleProblem, r: f64, grid: usize) -> (usize, Vec<f64>, Vec<usize>) {
    let mut grid = grid;
    loop {
        let values = problem.angular_grid(r, grid);
        let peaks = grid_peaks(&values);
        if grid >= MAX_GRID || !crowded(&peaks, grid) {
            return (grid, values, peaks);
        }
        grid *= 2;
    }
}

/// Safeguarded Newton for `∂θ mod2 = 0` on a bracket with `∂θ > 0` at `lo`
/// and `< 0` at `hi`. Returns the unwrapped maximizer.
pub(crate) fn refine(
    e: &ModulusExpansion,
    r: f64,
    mut lo: f64,
    mut hi: f64,
    seed: f64,
    cfg: &TraceConfig,
) -> Result<f64, TraceError> {
    let failure = TraceError::RefinementFailure {
        r,
        theta_seed: angle::wrap(seed),
    };
    let tol = cfg.newton_tol * e.derivative_scale(r);
    let mut x = seed.clamp(lo, hi);
    for _ in 0..cfg.newton_max_iter {
        let (_, d1, d2) = e.angular_jet(r, x);
        if d1 == 0.0 {
            return Ok(x);
        }
        if d1 > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - d1 / d2;
        let next = if d2 < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= STEP_FLOOR * x.abs().max(1.0) || hi - lo <= STEP_FLOOR * x.abs().max(1.0) {
            let (_, d1, _) = e.angular_jet(r, x);
            return if d1.abs() <= tol { Ok(x) } else { Err(failure) };
        }
    }
    let (_, d1, _) = e.angular_jet(r, x);
    if d1.abs() <= tol {
        Ok(x)
    } else {
        Err(failure)
    }
}

/// Bracket around a seed, widened by whole steps until the derivative
/// changes sign from positive to negative.
pub(crate) fn bracket(e: &ModulusExpansion, r: f64, seed: f64, step: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (seed - step, seed + step);
    for _ in 0..8 {
        let dlo = e.dmod2_dtheta(r, lo);
        let dhi = e.dmod2_dtheta(r, hi);
        match (dlo > 0.0, dhi < 0.0) {
            (true, true) => return Some((lo, hi)),
            (false, _) => lo -= step,
            (_, false) => hi += step,
        }
        if hi - lo >= PI {
            break;
        }
    }
    None
}

/// Newton-refined global maximizers on the circle of radius `r`.
pub fn circle_argmax(
    problem: &CircleProblem,
    r: f64,
    cfg: &TraceConfig,
) -> Result<Vec<CircleMax>, TraceError> {
    let e = problem.expansion();
    let (grid, values, peaks) = scan(problem, r, cfg.grid);
    let step = TAU / grid as f64;
    let grid_min = values.iter().copied().fold(f64::INFINITY, f64::min);

    let mut refined = Vec::with_capacity(peaks.len());
    for &i in &peaks {
        let seed = grid_theta(i, grid);
        let (lo, hi) = bracket(e, r, seed, step).ok_or(TraceError::RefinementFailure {
            r,
            theta_seed: angle::wrap(seed),
        })?;
        let theta = angle::wrap(refine(e, r, lo, hi, seed, cfg)?);
        refined.push((theta, e.angular(r, theta)));
    }
    let best = refined
        .iter()
        .map(|x| x.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = best - grid_min.min(best);
    let cutoff = best - cfg.tie_tol * spread;
    let mut kept: Vec<(f64, f64)> = refined.into_iter().filter(|x| x.1 >= cutoff).collect();
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));

    // refined seeds that converged to the same point
    let merge = TAU / (8.0 * grid as f64);
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(kept.len());
    for m in kept {
        match merged
            .iter_mut()
            .find(|x| angle::distance(x.0, m.0) < merge)
        {
            Some(x) if m.1 > x.1 => *x = m,
            Some(_) => {}
            None => merged.push(m),
        }
    }
    let radial = e.radial(r);
    Ok(merged
        .into_iter()
        .map(|(theta, angular)| CircleMax {
            theta,
            mod2: radial + angular,
            angular,
        })
        .collect())
}

/// Dense-scan oracle: grid angles (wrapped) whose `|p|^2`, evaluated
/// directly, lies within `tie_tol · (max - min)` of the grid maximum.
pub fn brute_force_mset(p: &Polynomial, r: f64, grid: usize, tie_tol: f64) -> Vec<f64> {
    let values: Vec<f64> = (0..grid)
        .map(|i| direct_mod2(p, r, grid_theta(i, grid)))
        .collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let cutoff = max - tie_tol * (max - min);
    let mut out: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v >= cutoff)
        .map(|(i, _)| angle::wrap(grid_theta(i, grid)))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Groups sorted angles into clusters of neighbours at most `gap` apart,
/// joining the first and last cluster across `±π`.
pub fn cluster_angles(sorted: &[f64], gap: f64) -> Vec<Vec<f64>> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &t in sorted {
        match clusters.last_mut() {
            Some(c) if t - c[c.len() - 1] <= gap => c.push(t),
            _ => clusters.push(vec![t]),
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let last = *clusters.last().unwrap().last().unwrap();
        if first + TAU - last <= gap {
            let head = clusters.remove(0);
            clusters.last_mut().unwrap().extend(head);
        }
    }
    clusters
}
