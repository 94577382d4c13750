//! Numerical maximum modulus set near the origin.
//!
//! Global maximizers of `θ ↦ |p(re^{iθ})|^2` are computed on a geometric
//! schedule of radii, linked into curves from the outside in, and each curve
//! is fitted against the candidate tangent rays `ω_j`.

pub mod argmax;
pub mod fit;
pub mod registry;

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::angle;
use crate::classify::{nearest_omega, omega_angles};
use crate::modulus::ModulusExpansion;
use crate::poly::{
    inner_degree, normalize, reciprocal, HaymanForm, Normalized, PolyError, Polynomial,
};

pub use argmax::{brute_force_mset, circle_argmax, cluster_angles, CircleMax, CircleProblem};
pub use fit::{fit_tangent, TangentFit};
pub use registry::{CircleMaximizer, DenseScan, MaximizerRegistry, NewtonRefined};

/// Radii followed by a shadow when checking a birth or death.
const SHADOW_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radii: usize,
    /// θ samples per circle before adaptive doubling.
    pub grid: usize,
    /// Co-maximality tolerance relative to the spread of `|p|^2` on the circle.
    pub tie_tol: f64,
    /// Bound on `|∂θ |p|^2|` relative to [`ModulusExpansion::derivative_scale`].
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Fixed linking threshold in radians; derived per step when `None`.
    pub link_tol: Option<f64>,
    /// Name of the circle maximizer in the default registry.
    pub method: String,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max: 0.3,
            n_radii: 200,
            grid: 4096,
            tie_tol: 1e-12,
            newton_tol: 1e-10,
            newton_max_iter: 60,
            link_tol: None,
            method: "newton".to_string(),
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<(), TraceError> {
        let bad = |msg: &str| Err(TraceError::InvalidConfig(msg.to_string()));
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            return bad("r_min must be positive");
        }
        if !(self.r_max > self.r_min && self.r_max.is_finite()) {
            return bad("r_max must exceed r_min");
        }
        if self.n_radii < 2 {
            return bad("n_radii must be at least 2");
        }
        if self.grid < 64 {
            return bad("grid must be at least 64");
        }
        if !(self.tie_tol > 0.0 && self.newton_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be positive");
        }
        if let Some(t) = self.link_tol {
            if t.is_nan() || t <= 0.0 {
                return bad("link_tol must be positive");
            }
        }
        Ok(())
    }

    /// Geometric schedule from `r_max` down to `r_min`, endpoints exact.
    pub fn radii(&self) -> Vec<f64> {
        let n = self.n_radii;
        let ratio = self.r_min / self.r_max;
        (0..n)
            .map(|i| match i {
                0 => self.r_max,
                _ if i == n - 1 => self.r_min,
                _ => self.r_max * ratio.powf(i as f64 / (n - 1) as f64),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("invalid trace configuration: {0}")]
    InvalidConfig(String),
    #[error("ZeroPolynomial: nothing to trace")]
    ZeroPolynomial,
    #[error("MonomialAllPlane: every point is a maximum modulus point of a monomial")]
    Monomial,
    #[error("r_min = {r_min:e} is below the numerical floor; use r_min >= {min_admissible:e}")]
    FloorViolation { r_min: f64, min_admissible: f64 },
    #[error("RefinementFailure at r = {r:e}, seed θ = {theta_seed}")]
    RefinementFailure { r: f64, theta_seed: f64 },
    #[error(
        "CurveBirthDeath: curve {curve_id} {kind} at r = {radius:e} without a persistent deficit"
    )]
    CurveBirthDeath {
        curve_id: usize,
        kind: EventKind,
        radius: f64,
    },
    #[error("unknown circle maximizer {0:?}")]
    UnknownMethod(String),
}

impl From<PolyError> for TraceError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::ZeroPolynomial => TraceError::ZeroPolynomial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Birth,
    Death,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EventKind::Birth => "appears",
            EventKind::Death => "vanishes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub r: f64,
    pub theta: f64,
    pub mod2: f64,
    pub curve_id: usize,
}

/// A curve that starts or ends inside the schedule. `deficits` are the
/// shadow local maximum's distance below the circle maximum, relative to
/// the angular scale, at successive radii moving away from the event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifecycleEvent {
    pub curve_id: usize,
    pub kind: EventKind,
    pub radius: f64,
    pub deficits: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub curve_id: usize,
    pub r_outer: f64,
    pub r_inner: f64,
    pub n_samples: usize,
    pub reaches_r_min: bool,
    pub tangent: Option<TangentFit>,
    pub matched_j: usize,
    pub matched_omega: f64,
    pub omega_error: f64,
}

/// Curve `to` is curve `from` rotated by `2π m/μ`, up to `max_deviation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryPair {
    pub from: usize,
    pub to: usize,
    pub m: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    /// Sorted by curve, then by decreasing radius.
    pub samples: Vec<CurveSample>,
    /// The schedule, decreasing.
    pub radii: Vec<f64>,
    /// Curves that reach `r_min`.
    pub n_components: usize,
    pub curves: Vec<CurveSummary>,
    pub symmetry: Vec<SymmetryPair>,
    pub events: Vec<LifecycleEvent>,
    /// Largest radius from which the number of maximizers per circle stays
    /// at its final value.
    pub final_count_radius: f64,
    /// Sample points stand for `1/z` in the original plane.
    pub at_infinity: bool,
    pub mu: usize,
    pub omega: Vec<f64>,
}

impl TraceResult {
    pub fn curve_samples(&self, curve_id: usize) -> impl Iterator<Item = &CurveSample> {
        self.samples.iter().filter(move |s| s.curve_id == curve_id)
    }

    /// Ids of the curves that reach `r_min`.
    pub fn final_curves(&self) -> Vec<usize> {
        self.curves
            .iter()
            .filter(|c| c.reaches_r_min)
            .map(|c| c.curve_id)
            .collect()
    }
}

/// Smallest admissible `r_min`: where `2|a| r^k = 10^6 ε (Σ|a_ℓ|)^2`.
pub fn numerical_floor(h: &HaymanForm) -> f64 {
    let s: f64 = h.tail.coeffs().iter().map(|c| c.norm()).sum();
    let rhs = 1e6 * f64::EPSILON * s * s;
    (rhs / (2.0 * h.a.norm())).powf(1.0 / h.k as f64)
}

fn hayman(p: &Polynomial) -> Result<HaymanForm, TraceError> {
    match normalize(p)? {
        Normalized::Hayman(h) => Ok(h),
        Normalized::Monomial(_) => Err(TraceError::Monomial),
    }
}

pub fn trace(p: &Polynomial, cfg: &TraceConfig) -> Result<TraceResult, TraceError> {
    let strategy = MaximizerRegistry::default().get(&cfg.method)?;
    trace_with(p, cfg, strategy.as_ref())
}

/// The structure near infinity: the trace of the normalized reciprocal.
pub fn trace_at_infinity(p: &Polynomial, cfg: &TraceConfig) -> Result<TraceResult, TraceError> {
    let q = hayman(&reciprocal(p)?)?.tail;
    let mut result = trace(&q, cfg)?;
    result.at_infinity = true;
    Ok(result)
}

struct Curve {
    id: usize,
    /// `(radius index, θ, angular part)`.
    points: Vec<(usize, f64, f64)>,
    alive: bool,
}

fn predictor_slope(e: &ModulusExpansion, r: f64, theta: f64) -> f64 {
    let d2 = e.d2mod2_dtheta2(r, theta);
    if d2 < 0.0 {
        -e.d2mod2_dtheta_dr(r, theta) / d2
    } else {
        0.0
    }
}

/// Local maximum of the angular part near `theta`, if one brackets there.
fn local_max_near(
    e: &ModulusExpansion,
    r: f64,
    theta: f64,
    cfg: &TraceConfig,
) -> Option<(f64, f64)> {
    let step = TAU / cfg.grid as f64;
    let (lo, hi) = argmax::bracket(e, r, theta, step)?;
    let t = angle::wrap(argmax::refine(e, r, lo, hi, theta, cfg).ok()?);
    Some((t, e.angular(r, t)))
}

/// Follows a non-global local maximum across `indices`, returning its
/// relative deficit at each radius until it disappears.
fn shadow_deficits(
    e: &ModulusExpansion,
    radii: &[f64],
    maxima: &[Vec<CircleMax>],
    start: f64,
    indices: impl Iterator<Item = usize>,
    cfg: &TraceConfig,
) -> Vec<f64> {
    let mut out = Vec::new();
    let mut theta = start;
    let mut prev_r: Option<f64> = None;
    for i in indices.take(SHADOW_STEPS) {
        let r = radii[i];
        let guess = match prev_r {
            Some(r0) => theta + predictor_slope(e, r0, theta) * (r - r0),
            None => theta,
        };
        let Some((t, ang)) = local_max_near(e, r, guess, cfg) else {
            break;
        };
        let best = maxima[i]
            .iter()
            .map(|m| m.angular)
            .fold(f64::NEG_INFINITY, f64::max);
        out.push((best - ang) / e.angular_scale(r));
        theta = t;
        prev_r = Some(r);
    }
    out
}

/// A real event leaves a shadow that is strictly and increasingly below the
/// maximum; flicker between near-equal maxima does not.
fn persistent(deficits: &[f64], tie_tol: f64) -> bool {
    deficits.iter().all(|&d| d > tie_tol) && deficits.windows(2).all(|w| w[1] >= w[0])
}

pub fn trace_with(
    p: &Polynomial,
    cfg: &TraceConfig,
    strategy: &dyn CircleMaximizer,
) -> Result<TraceResult, TraceError> {
    cfg.validate()?;
    let h = hayman(p)?;
    let floor = numerical_floor(&h);
    if cfg.r_min < floor {
        return Err(TraceError::FloorViolation {
            r_min: cfg.r_min,
            min_admissible: floor,
        });
    }
    let problem = CircleProblem::new(&h.tail);
    let e = problem.expansion();
    let radii = cfg.radii();
    let maxima: Vec<Vec<CircleMax>> = radii
        .par_iter()
        .map(|&r| strategy.maximize(&problem, r, cfg))
        .collect::<Result<_, _>>()?;

    let mut curves: Vec<Curve> = maxima[0]
        .iter()
        .enumerate()
        .map(|(id, m)| Curve {
            id,
            points: vec![(0, m.theta, m.angular)],
            alive: true,
        })
        .collect();
    let mut events = Vec::new();

    for i in 0..radii.len() - 1 {
        let (r0, r1) = (radii[i], radii[i + 1]);
        let next = &maxima[i + 1];
        let alive: Vec<usize> = (0..curves.len()).filter(|&c| curves[c].alive).collect();
        let predicted: Vec<f64> = alive
            .iter()
            .map(|&c| {
                let theta = curves[c].points.last().expect("nonempty").1;
                theta + predictor_slope(e, r0, theta) * (r1 - r0)
            })
            .collect();
        let link_tol = cfg.link_tol.unwrap_or_else(|| {
            let drift = alive
                .iter()
                .zip(&predicted)
                .map(|(&c, p)| angle::distance(*p, curves[c].points.last().expect("nonempty").1))
                .fold(0.0, f64::max);
            3.0 * drift.max(TAU / cfg.grid as f64)
        });

        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (slot, pred) in predicted.iter().enumerate() {
            for (j, m) in next.iter().enumerate() {
                let d = angle::distance(*pred, m.theta);
                if d < link_tol {
                    pairs.push((d, slot, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut curve_of: Vec<Option<usize>> = vec![None; next.len()];
        let mut linked = vec![false; alive.len()];
        for (_, slot, j) in pairs {
            if !linked[slot] && curve_of[j].is_none() {
                linked[slot] = true;
                curve_of[j] = Some(alive[slot]);
            }
        }

        // an unmatched curve whose shadow lands on an unmatched maximizer was
        // only mislinked; anything else must be a genuine death
        let merge = TAU / (8.0 * cfg.grid as f64);
        for slot in (0..alive.len()).filter(|&s| !linked[s]) {
            let c = alive[slot];
            let shadow = local_max_near(e, r1, predicted[slot], cfg);
            let relink = shadow.and_then(|(t, _)| {
                (0..next.len()).find(|&j| {
                    curve_of[j].is_none() && angle::distance(next[j].theta, t) < merge.max(link_tol)
                })
            });
            if let Some(j) = relink {
                curve_of[j] = Some(c);
                continue;
            }
            let start = curves[c].points.last().expect("nonempty").1;
            let deficits = shadow_deficits(e, &radii, &maxima, start, i + 1..radii.len(), cfg);
            if !persistent(&deficits, cfg.tie_tol) {
                return Err(TraceError::CurveBirthDeath {
                    curve_id: curves[c].id,
                    kind: EventKind::Death,
                    radius: r1,
                });
            }
            curves[c].alive = false;
            events.push(LifecycleEvent {
                curve_id: curves[c].id,
                kind: EventKind::Death,
                radius: r1,
                deficits,
            });
        }

        for (j, m) in next.iter().enumerate() {
            match curve_of[j] {
                Some(c) => curves[c].points.push((i + 1, m.theta, m.angular)),
                None => {
                    let id = curves.len();
                    let deficits = shadow_deficits(e, &radii, &maxima, m.theta, (0..=i).rev(), cfg);
                    if !persistent(&deficits, cfg.tie_tol) {
                        return Err(TraceError::CurveBirthDeath {
                            curve_id: id,
                            kind: EventKind::Birth,
                            radius: r1,
                        });
                    }
                    events.push(LifecycleEvent {
                        curve_id: id,
                        kind: EventKind::Birth,
                        radius: r1,
                        deficits,
                    });
                    curves.push(Curve {
                        id,
                        points: vec![(i + 1, m.theta, m.angular)],
                        alive: true,
                    });
                }
            }
        }
    }

    let last = radii.len() - 1;
    let scale = h.prefactor_scalar.norm_sqr();
    let power = 2 * h.prefactor_power as i32;
    let omega = omega_angles(&h);
    let mut samples = Vec::new();
    let mut summaries = Vec::new();
    for c in &curves {
        for &(i, theta, angular) in &c.points {
            let r = radii[i];
            samples.push(CurveSample {
                r,
                theta,
                mod2: (e.radial(r) + angular) * scale * r.powi(power),
                curve_id: c.id,
            });
        }
        let polar: Vec<(f64, f64)> = c.points.iter().map(|&(i, t, _)| (radii[i], t)).collect();
        let tangent = fit_tangent(&polar);
        let inner = polar.last().expect("nonempty");
        let (matched_j, omega_error) =
            nearest_omega(&omega, tangent.map_or(inner.1, |t| t.omega_hat));
        summaries.push(CurveSummary {
            curve_id: c.id,
            r_outer: polar[0].0,
            r_inner: inner.0,
            n_samples: polar.len(),
            reaches_r_min: c.points.last().expect("nonempty").0 == last,
            tangent,
            matched_j,
            matched_omega: omega[matched_j],
            omega_error,
        });
    }

    let counts: Vec<usize> = maxima.iter().map(Vec::len).collect();
    let final_count = counts[last];
    let from = (0..=last)
        .rev()
        .take_while(|&i| counts[i] == final_count)
        .last()
        .unwrap_or(last);
    let mu = inner_degree(&h);

    Ok(TraceResult {
        samples,
        n_components: summaries.iter().filter(|c| c.reaches_r_min).count(),
        symmetry: symmetry_pairs(&curves, mu),
        curves: summaries,
        events,
        final_count_radius: radii[from],
        radii,
        at_infinity: false,
        mu,
        omega,
    })
}

/// For each curve, the curve closest to its rotation by `2π/μ`, compared at
/// the radii both span.
fn symmetry_pairs(curves: &[Curve], mu: usize) -> Vec<SymmetryPair> {
    if mu < 2 {
        return Vec::new();
    }
    let shift = TAU / mu as f64;
    let mut out = Vec::new();
    for a in curves {
        let best = curves
            .iter()
            .filter(|b| b.id != a.id)
            .filter_map(|b| {
                let mut dev: Option<f64> = None;
                for &(i, ta, _) in &a.points {
                    if let Some(&(_, tb, _)) = b.points.iter().find(|p| p.0 == i) {
                        let d = angle::distance(ta + shift, tb);
                        dev = Some(dev.map_or(d, |x: f64| x.max(d)));
                    }
                }
                dev.map(|d| (b.id, d))
            })
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((to, max_deviation)) = best {
            out.push(SymmetryPair {
                from: a.id,
                to,
                m: 1,
                max_deviation,
            });
        }
    }
    out
}
