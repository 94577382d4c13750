//! Seeded search for counterexamples to `#J = 2μ` among magic polynomials.
//!
//! Each sample is classified and traced; one JSON line is produced per
//! sample, in sample order, whatever the thread count.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::classify::{classify, MagicVerdict};
use crate::parse::coeffs_to_pairs;
use crate::poly::{normalize, Polynomial};
use crate::tracer::{numerical_floor, trace, TraceConfig};

/// A sampled polynomial and whether it was placed on the exceptional locus.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub poly: Polynomial,
    pub on_locus: bool,
}

pub trait SampleFamily: Send + Sync {
    fn name(&self) -> &'static str;

    /// Draws one polynomial. With `on_locus`, one tail coefficient's
    /// argument is solved for so that the resonance condition holds
    /// exactly for a random `(m, m')`.
    fn sample(&self, rng: &mut ChaCha8Rng, on_locus: bool) -> Polynomial;
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(-PI..PI))
}

/// `arg b_σ` solving `m π = (k/σ)(m' π - arg b_σ) + arg a`.
pub fn locus_argument(k: usize, sigma: usize, m: i64, m_prime: i64, arg_a: f64) -> f64 {
    m_prime as f64 * PI - sigma as f64 * (m as f64 * PI - arg_a) / k as f64
}

/// Random `(m, m')` with `m ∈ 1..=2k-3` and `m' ∈ {0, 1}`; `m'` only
/// matters mod 2.
fn place_on_locus(
    rng: &mut ChaCha8Rng,
    k: usize,
    sigma: usize,
    a: Complex64,
    b: Complex64,
) -> Complex64 {
    let m = rng.gen_range(1..=(2 * k - 3) as i64);
    let m_prime = rng.gen_range(0..=1);
    Complex64::from_polar(b.norm(), locus_argument(k, sigma, m, m_prime, a.arg()))
}

/// `1 + a z^2 + b z^3`.
#[derive(Debug, Default, Clone, Copy)]
pub struct CubicFamily;

impl SampleFamily for CubicFamily {
    fn name(&self) -> &'static str {
        "cubic"
    }

    fn sample(&self, rng: &mut ChaCha8Rng, on_locus: bool) -> Polynomial {
        let a = random_coeff(rng);
        let mut b = random_coeff(rng);
        if on_locus {
            b = place_on_locus(rng, 2, 3, a, b);
        }
        Polynomial::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            a,
            b,
        ])
    }
}

/// `1 + a z^k + Σ_{k<σ≤4} b_σ z^σ` with `k ∈ {2, 3}`.
#[derive(Debug, Default, Clone, Copy)]
pub struct QuarticFamily;

impl SampleFamily for QuarticFamily {
    fn name(&self) -> &'static str {
        "quartic"
    }

    fn sample(&self, rng: &mut ChaCha8Rng, on_locus: bool) -> Polynomial {
        let k = rng.gen_range(2..=3usize);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 5];
        coeffs[0] = Complex64::new(1.0, 0.0);
        coeffs[k] = random_coeff(rng);
        for c in coeffs.iter_mut().skip(k + 1) {
            *c = random_coeff(rng);
        }
        // every tail coefficient is nonzero, so the core polynomial ends at
        // k + 1 and that is the only σ the resonance test looks at
        if on_locus {
            let sigma = k + 1;
            coeffs[sigma] = place_on_locus(rng, k, sigma, coeffs[k], coeffs[sigma]);
        }
        Polynomial::new(coeffs)
    }
}

pub struct FamilyRegistry {
    entries: BTreeMap<&'static str, Arc<dyn SampleFamily>>,
}

impl FamilyRegistry {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, f: Arc<dyn SampleFamily>) {
        self.entries.insert(f.name(), f);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn SampleFamily>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        let mut reg = Self::new();
        reg.register(Arc::new(CubicFamily));
        reg.register(Arc::new(QuarticFamily));
        reg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HuntConfig {
    pub samples: usize,
    pub seed: u64,
    /// Probability that a sample is placed on the exceptional locus.
    pub locus_fraction: f64,
    /// Trace settings; `r_min` is raised to twice the numerical floor when
    /// needed.
    pub trace: TraceConfig,
}

impl Default for HuntConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            locus_fraction: 0.5,
            trace: TraceConfig {
                r_max: 0.05,
                ..TraceConfig::default()
            },
        }
    }
}

/// The `index`-th sample of a run; independent of how samples are scheduled.
pub fn draw(family: &dyn SampleFamily, cfg: &HuntConfig, index: usize) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let on_locus = rng.gen_bool(cfg.locus_fraction.clamp(0.0, 1.0));
    Sample {
        poly: family.sample(&mut rng, on_locus),
        on_locus,
    }
}

/// One findings record.
///
/// `conjecture_holds` asks whether the traced count is what the theory
/// allows: `μ` off the exceptional locus; on it, `μ` or `2μ`, and exactly
/// `2μ` under a MAGIC verdict. It is `null` when the trace failed.
pub fn evaluate(sample: &Sample, cfg: &TraceConfig) -> Value {
    let p = &sample.poly;
    let mut record = json!({
        "coeffs": coeffs_to_pairs(p),
        "on_locus": sample.on_locus,
    });
    let c = match classify(p) {
        Ok(c) => c,
        Err(e) => {
            record["error"] = Value::String(e.to_string());
            return record;
        }
    };
    record["exceptional"] = Value::Bool(c.exceptional);
    record["magic"] = json!(c.magic.as_str());
    record["mu"] = json!(c.mu);
    let h = normalize(p)
        .ok()
        .and_then(|n| n.hayman())
        .expect("classified polynomials normalize");
    let trace_cfg = TraceConfig {
        r_min: cfg.r_min.max(2.0 * numerical_floor(&h)),
        ..cfg.clone()
    };
    match trace(p, &trace_cfg) {
        Ok(t) => {
            let n = t.n_components;
            let holds = if !c.exceptional {
                n == c.mu
            } else if c.magic == MagicVerdict::Magic {
                n == 2 * c.mu
            } else {
                n == c.mu || n == 2 * c.mu
            };
            record["n_components"] = json!(n);
            record["conjecture_holds"] = Value::Bool(holds);
        }
        Err(e) => {
            record["n_components"] = Value::Null;
            record["conjecture_holds"] = Value::Null;
            record["error"] = Value::String(e.to_string());
        }
    }
    record
}

/// All records of a run, in sample order.
pub fn hunt(family: &dyn SampleFamily, cfg: &HuntConfig) -> Vec<Value> {
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| evaluate(&draw(family, cfg, i), &cfg.trace))
        .collect()
}
