//! Local structure of the maximum modulus set of complex polynomials.
//!
//! For `f = 1 + a z^k + ...` the set `{z : |f(z)| = max_{|w|=|z|} |f(w)|}`
//! is, near the origin, a union of analytic curves tangent to some of the
//! rays `arg z = ω_j`. [`classify`] predicts how many from the coefficients
//! alone; [`tracer`] computes the set numerically so the prediction can be
//! checked.

pub mod angle;
pub mod classify;
pub mod hunt;
pub mod modulus;
pub mod parse;
pub mod poly;
pub mod report;
pub mod tracer;

pub use classify::{classify, Classification, MagicVerdict, PredictedCount};
pub use modulus::{direct_mod2, expand, ModulusExpansion};
pub use parse::{parse_poly, parse_poly_json};
pub use poly::{normalize, reciprocal, HaymanForm, Normalized, Polynomial};
pub use tracer::{trace, trace_at_infinity, TraceConfig, TraceError, TraceResult};
