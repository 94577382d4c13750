//! Coefficient-level classification of `f = 1 + a z^k + Σ b_σ z^σ`.
//!
//! Everything here is read off the coefficients: the candidate tangent
//! angles `ω_j`, the arithmetic resonance test that separates exceptional
//! from minimal polynomials, the greedy selection of surviving candidate
//! curves, and the closed-form magic test for cubics.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::angle;
use crate::poly::{
    core_polynomial, inner_degree, normalize, HaymanForm, Normalized, PolyError, Polynomial,
};

/// Integer test on `m'`.
pub const EPS_ARG: f64 = 1e-9;
/// Residuals up to this value trigger a near-exceptional warning.
pub const NEAR_EXCEPTIONAL: f64 = 1e-6;
/// Tie threshold for `t_j`, relative to `2|b_n|`.
pub const EPS_T: f64 = 1e-9;
/// Zero test on `Re(b a^{-3/2})`, relative to `|b a^{-3/2}|`.
pub const EPS_MAG: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("ZeroPolynomial: the zero polynomial has no maximum modulus structure")]
    ZeroPolynomial,
    #[error("MonomialAllPlane: the maximum modulus set of c z^n is the whole plane")]
    MonomialAllPlane,
    #[error("NotCubicFamily: tail has degree {degree}, the cubic criterion needs degree <= 3")]
    NotCubicFamily { degree: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<PolyError> for ClassifyError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::ZeroPolynomial => ClassifyError::ZeroPolynomial,
        }
    }
}

/// One solution `(m, m', σ)` of the resonance condition
/// `mπ = (k/σ)(m'π - arg b_σ) + arg a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalWitness {
    pub m: i64,
    pub m_prime: i64,
    pub sigma: usize,
    /// Distance of the computed `m'` from the nearest integer.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceScan {
    pub witnesses: Vec<ExceptionalWitness>,
    /// Smallest residual over every `(m, σ)` scanned; `None` when the scan
    /// range is empty (`k = 1` or no admissible `σ`).
    pub closest: Option<ExceptionalWitness>,
}

/// Scans `m ∈ {1, …, 2k-3}` and `σ ∈ {k+1, …, sigma_max}` with `b_σ ≠ 0`.
pub fn resonance_scan(h: &HaymanForm, sigma_max: usize) -> ResonanceScan {
    let k = h.k;
    let arg_a = angle::principal_arg(h.a) / PI;
    let mut witnesses = Vec::new();
    let mut closest: Option<ExceptionalWitness> = None;
    for sigma in (k + 1)..=sigma_max {
        let b = h.coeff(sigma);
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        let arg_b = angle::principal_arg(b) / PI;
        for m in 1..(2 * k as i64 - 2) {
            let m_prime = sigma as f64 * (m as f64 - arg_a) / k as f64 + arg_b;
            let nearest = m_prime.round();
            let w = ExceptionalWitness {
                m,
                m_prime: nearest as i64,
                sigma,
                residual: (m_prime - nearest).abs(),
            };
            if w.residual <= EPS_ARG {
                witnesses.push(w);
            }
            if closest.is_none_or(|c| w.residual < c.residual) {
                closest = Some(w);
            }
        }
    }
    ResonanceScan { witnesses, closest }
}

/// Exceptional test over `σ` up to the core polynomial degree `N`.
pub fn is_exceptional(h: &HaymanForm) -> (bool, Vec<ExceptionalWitness>) {
    let (n, _) = core_polynomial(h);
    let scan = resonance_scan(h, n);
    (!scan.witnesses.is_empty(), scan.witnesses)
}

/// Minimality of the polynomial itself: the resonance condition fails for
/// every `σ` up to its degree.
pub fn is_minimal(h: &HaymanForm) -> bool {
    resonance_scan(h, h.degree()).witnesses.is_empty()
}

/// `ω_j = (2jπ - arg a)/k`, `j = 0, …, k-1`, unreduced.
pub fn omega_raw(h: &HaymanForm) -> Vec<f64> {
    let arg_a = angle::principal_arg(h.a);
    (0..h.k)
        .map(|j| (2.0 * j as f64 * PI - arg_a) / h.k as f64)
        .collect()
}

/// `ω_j` reduced to `(-π, π]`, indexed by `j`.
pub fn omega_angles(h: &HaymanForm) -> Vec<f64> {
    omega_raw(h).into_iter().map(angle::wrap).collect()
}

/// Index of the `ω_j` closest to `theta`, with the angular distance.
pub fn nearest_omega(omega: &[f64], theta: f64) -> (usize, f64) {
    omega
        .iter()
        .enumerate()
        .map(|(j, &w)| (j, angle::distance(theta, w)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("k >= 1")
}

/// Membership in the sector `S_j(r, φ)` for a point of modulus `modulus`
/// and argument `theta`.
pub fn in_sector(omega_j: f64, radius: f64, phi: f64, modulus: f64, theta: f64) -> bool {
    modulus > 0.0 && modulus <= radius && angle::distance(theta, omega_j) < phi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagicVerdict {
    NotMagic,
    Magic,
    Unknown,
}

impl MagicVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MagicVerdict::NotMagic => "NOT_MAGIC",
            MagicVerdict::Magic => "MAGIC",
            MagicVerdict::Unknown => "UNKNOWN",
        }
    }
}

impl Serialize for MagicVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// `b' = b a^{-3/2}` for a tail `1 + a z^2 + b z^3`, using the principal
/// square root of `a`. The other branch gives `-b'`.
pub fn rescaled_cubic_coefficient(h: &HaymanForm) -> Option<Complex64> {
    (h.k == 2 && h.degree() == 3).then(|| h.coeff(3) / (h.a * h.a.sqrt()))
}

pub fn cubic_magic(h: &HaymanForm) -> Result<MagicVerdict, ClassifyError> {
    let degree = h.degree();
    if degree > 3 {
        return Err(ClassifyError::NotCubicFamily { degree });
    }
    Ok(match rescaled_cubic_coefficient(h) {
        Some(b) if b.re.abs() <= EPS_MAG * b.norm() => MagicVerdict::Magic,
        _ => MagicVerdict::NotMagic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Validity {
    Proven,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TStep {
    pub exponent: usize,
    /// `(j, t_j)` for every `j` still in play before this term.
    pub t: Vec<(usize, f64)>,
    pub retained: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictedJ {
    pub j_set: Vec<usize>,
    pub validity: Validity,
    pub t_history: Vec<TStep>,
}

/// Greedy candidate-curve selection: start from all of `{0, …, k-1}` and,
/// for each further term `b_n z^n`, keep the `j` maximizing
/// `t_j = 2|b_n| cos(n ω_j + arg b_n)`.
///
/// Exact for minimal polynomials; for exceptional ones the answer is only a
/// heuristic.
pub fn predict_j(h: &HaymanForm) -> Result<PredictedJ, ClassifyError> {
    let omega = omega_raw(h);
    let mut j_set: Vec<usize> = (0..h.k).collect();
    let mut t_history = Vec::new();
    for n in h.tail.support().filter(|&n| n > h.k) {
        let b = h.coeff(n);
        let (mag, arg_b) = (b.norm(), angle::principal_arg(b));
        let t: Vec<(usize, f64)> = j_set
            .iter()
            .map(|&j| (j, 2.0 * mag * (n as f64 * omega[j] + arg_b).cos()))
            .collect();
        let best = t.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let cutoff = best - EPS_T * 2.0 * mag;
        j_set = t.iter().filter(|x| x.1 >= cutoff).map(|x| x.0).collect();
        t_history.push(TStep {
            exponent: n,
            t,
            retained: j_set.clone(),
        });
    }
    let (exceptional, _) = is_exceptional(h);
    let validity = if exceptional {
        Validity::Heuristic
    } else {
        Validity::Proven
    };
    if validity == Validity::Proven {
        let mu = inner_degree(h);
        let period = h.k / mu;
        let single_class = j_set.iter().all(|j| j % period == j_set[0] % period);
        if j_set.len() != mu || !single_class {
            return Err(ClassifyError::Internal(format!(
                "minimal polynomial produced J = {j_set:?}, expected one residue class of size {mu} mod {period}"
            )));
        }
    }
    Ok(PredictedJ {
        j_set,
        validity,
        t_history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictedCount {
    Exact(usize),
    /// Multiples of `step` from `min` to `max`.
    Range {
        min: usize,
        max: usize,
        step: usize,
    },
}

impl PredictedCount {
    pub fn contains(&self, n: usize) -> bool {
        match *self {
            PredictedCount::Exact(m) => n == m,
            PredictedCount::Range { min, max, step } => {
                n >= min && n <= max && (n - min).is_multiple_of(step)
            }
        }
    }
}

impl Serialize for PredictedCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match *self {
            PredictedCount::Exact(n) => s.serialize_u64(n as u64),
            PredictedCount::Range { min, max, step } => {
                let mut st = s.serialize_struct("Range", 3)?;
                st.serialize_field("min", &min)?;
                st.serialize_field("max", &max)?;
                st.serialize_field("step", &step)?;
                st.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub mu: usize,
    #[serde(rename = "N")]
    pub n_core: usize,
    pub omega: Vec<f64>,
    pub exceptional: bool,
    pub witnesses: Vec<ExceptionalWitness>,
    pub magic: MagicVerdict,
    pub predicted_count: PredictedCount,
    pub conjecture_count: Option<usize>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub k: usize,
    #[serde(skip)]
    pub minimal: bool,
    #[serde(skip)]
    pub predicted_j: PredictedJ,
}

pub fn classify_form(h: &HaymanForm) -> Result<Classification, ClassifyError> {
    let mu = inner_degree(h);
    let (n_core, _) = core_polynomial(h);
    let scan = resonance_scan(h, n_core);
    let exceptional = !scan.witnesses.is_empty();
    let mut warnings = Vec::new();
    if let Some(w) = scan
        .closest
        .filter(|w| w.residual > EPS_ARG && w.residual <= NEAR_EXCEPTIONAL)
    {
        warnings.push(format!(
            "near-exceptional: m' = {} off by {:.3e} at m = {}, sigma = {}",
            w.m_prime, w.residual, w.m, w.sigma
        ));
    }
    let predicted_j = predict_j(h)?;
    let magic = if h.degree() <= 3 && !h.tail.is_truncated_series() {
        cubic_magic(h)?
    } else if predicted_j.validity == Validity::Proven && predicted_j.j_set.len() == mu {
        MagicVerdict::NotMagic
    } else {
        MagicVerdict::Unknown
    };
    if magic == MagicVerdict::Magic && !exceptional {
        return Err(ClassifyError::Internal(
            "cubic magic criterion holds but the resonance test failed".into(),
        ));
    }
    let predicted_count = if exceptional {
        PredictedCount::Range {
            min: mu,
            max: h.k,
            step: mu,
        }
    } else {
        PredictedCount::Exact(mu)
    };
    Ok(Classification {
        mu,
        n_core,
        omega: omega_angles(h),
        exceptional,
        witnesses: scan.witnesses,
        magic,
        predicted_count,
        conjecture_count: (magic == MagicVerdict::Magic).then_some(2 * mu),
        warnings,
        k: h.k,
        minimal: is_minimal(h),
        predicted_j,
    })
}

pub fn classify(p: &Polynomial) -> Result<Classification, ClassifyError> {
    match normalize(p)? {
        Normalized::Monomial(_) => Err(ClassifyError::MonomialAllPlane),
        Normalized::Hayman(h) => classify_form(&h),
    }
}
