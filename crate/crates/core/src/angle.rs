//! Angle conventions. Arguments live in `(-π, π]`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Reduces an angle to `(-π, π]`.
pub fn wrap(theta: f64) -> f64 {
    let y = theta.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// `arg z` in `(-π, π]`; `atan2` may return `-π` for a negative real with a
/// negative-zero imaginary part.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}
