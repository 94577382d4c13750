//! Polynomial representation and the normal form `1 + a z^k + ...`.
//!
//! Multiplying by `c z^m` does not change the maximum modulus set, so every
//! nonzero, non-monomial polynomial is reduced to a tail with constant term
//! one before anything else looks at it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ZeroPolynomial: the zero polynomial has no maximum modulus structure")]
    ZeroPolynomial,
}

/// Complex polynomial with coefficients in ascending degree order.
///
/// Trailing zeros are trimmed at construction (exact zeros only), so the
/// last stored coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
    /// Set when the coefficients are a truncated Taylor series of a
    /// transcendental function. Classification is still meaningful, tracing
    /// is not.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    truncated: bool,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        Self {
            coeffs,
            truncated: false,
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Marks the coefficients as a truncation of an infinite series.
    pub fn into_truncated_series(mut self) -> Self {
        self.truncated = true;
        self
    }

    pub fn is_truncated_series(&self) -> bool {
        self.truncated
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Exponents carrying a nonzero coefficient, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !is_zero(**c))
            .map(|(n, _)| n)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Truncation to degree `n` (inclusive).
    pub fn truncate(&self, n: usize) -> Polynomial {
        let end = (n + 1).min(self.coeffs.len());
        Polynomial::new(self.coeffs[..end].to_vec())
    }

    /// `p(λ z)`.
    pub fn compose_scale(&self, lambda: Complex64) -> Polynomial {
        let mut pow = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * pow);
            pow *= lambda;
        }
        Polynomial {
            coeffs: out,
            truncated: self.truncated,
        }
    }
}

pub(crate) fn is_zero(c: Complex64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

/// A polynomial written as `prefactor_scalar * z^prefactor_power * tail(z)`
/// with `tail = 1 + a z^k + higher order terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaymanForm {
    pub prefactor_scalar: Complex64,
    pub prefactor_power: usize,
    pub k: usize,
    pub a: Complex64,
    pub tail: Polynomial,
}

impl HaymanForm {
    /// Builds the form directly from a tail, checking its shape.
    pub fn from_tail(tail: Polynomial) -> Option<Self> {
        if tail.coeff(0) != Complex64::new(1.0, 0.0) {
            return None;
        }
        let k = tail.support().find(|&n| n > 0)?;
        Some(Self {
            prefactor_scalar: Complex64::new(1.0, 0.0),
            prefactor_power: 0,
            k,
            a: tail.coeff(k),
            tail,
        })
    }

    /// Coefficient `b_n` of the tail.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.tail.coeff(n)
    }

    pub fn degree(&self) -> usize {
        self.tail.degree().unwrap_or(0)
    }

    /// Multiplies the prefactor back in.
    pub fn reconstruct(&self) -> Polynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.prefactor_power];
        coeffs.extend(self.tail.coeffs().iter().map(|c| c * self.prefactor_scalar));
        Polynomial::new(coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialVerdict {
    pub is_monomial: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    Hayman(HaymanForm),
    Monomial(MonomialVerdict),
}

impl Normalized {
    pub fn hayman(self) -> Option<HaymanForm> {
        match self {
            Normalized::Hayman(h) => Some(h),
            Normalized::Monomial(_) => None,
        }
    }
}

pub fn normalize(p: &Polynomial) -> Result<Normalized, PolyError> {
    let mut support = p.support();
    let m = support.next().ok_or(PolyError::ZeroPolynomial)?;
    if support.next().is_none() {
        return Ok(Normalized::Monomial(MonomialVerdict { is_monomial: true }));
    }
    let scalar = p.coeff(m);
    let mut tail: Vec<Complex64> = p.coeffs()[m..]
        .iter()
        .map(|c| if is_zero(*c) { *c } else { c / scalar })
        .collect();
    tail[0] = Complex64::new(1.0, 0.0);
    let tail = Polynomial {
        coeffs: tail,
        truncated: p.truncated,
    };
    let k = tail
        .support()
        .find(|&n| n > 0)
        .expect("two nonzero coefficients");
    Ok(Normalized::Hayman(HaymanForm {
        prefactor_scalar: scalar,
        prefactor_power: m,
        k,
        a: tail.coeff(k),
        tail,
    }))
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Largest `μ` with `f(z) = g(z^μ)`: the gcd of the positive exponents.
pub fn inner_degree(h: &HaymanForm) -> usize {
    h.tail.support().filter(|&n| n > 0).fold(0, gcd)
}

/// Shortest truncation of the tail whose inner degree already equals that
/// of the whole tail. Returns its degree `N` together with the truncation.
pub fn core_polynomial(h: &HaymanForm) -> (usize, Polynomial) {
    let mu = inner_degree(h);
    let mut running = 0;
    for n in h.tail.support().filter(|&n| n > 0) {
        running = gcd(running, n);
        if running == mu {
            return (n, h.tail.truncate(n));
        }
    }
    unreachable!("running gcd reaches the inner degree at the last exponent")
}

/// `z^n p(1/z)`: coefficient reversal.
pub fn reciprocal(p: &Polynomial) -> Result<Polynomial, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut coeffs = p.coeffs().to_vec();
    coeffs.reverse();
    let mut q = Polynomial::new(coeffs);
    q.truncated = p.truncated;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hayman(p: &Polynomial) -> HaymanForm {
        normalize(p).unwrap().hayman().unwrap()
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert!(Polynomial::from_real(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn monomial_is_detected() {
        let p = Polynomial::from_real(&[0.0, 0.0, 3.0]);
        assert_eq!(
            normalize(&p).unwrap(),
            Normalized::Monomial(MonomialVerdict { is_monomial: true })
        );
    }

    #[test]
    fn zero_polynomial_errors() {
        assert_eq!(
            normalize(&Polynomial::new(vec![])),
            Err(PolyError::ZeroPolynomial)
        );
        assert_eq!(
            reciprocal(&Polynomial::from_real(&[0.0])),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn scalar_is_divided_out() {
        let p = Polynomial::new(vec![c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 2.0)]);
        let h = hayman(&p);
        assert_eq!(h.prefactor_scalar, c(2.0, 0.0));
        assert_eq!(h.prefactor_power, 0);
        assert_eq!(h.k, 2);
        assert_eq!(h.a, c(1.0, 0.0));
        assert_eq!(
            h.tail.coeffs(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]
        );
    }

    #[test]
    fn monomial_factor_is_removed() {
        let p = Polynomial::new(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 1.0),
        ]);
        let h = hayman(&p);
        assert_eq!(h.prefactor_scalar, c(1.0, 0.0));
        assert_eq!(h.prefactor_power, 2);
        assert_eq!(h.k, 2);
        assert_eq!(h.a, c(1.0, 0.0));
        assert_eq!(
            h.tail.coeffs(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]
        );
    }

    #[test]
    fn inner_degree_examples() {
        let cubic = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(inner_degree(&hayman(&cubic)), 1);
        let even = Polynomial::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(inner_degree(&hayman(&even)), 2);
        for k in 1..7 {
            let mut coeffs = vec![0.0; k + 1];
            coeffs[0] = 1.0;
            coeffs[k] = -0.5;
            assert_eq!(inner_degree(&hayman(&Polynomial::from_real(&coeffs))), k);
        }
    }

    #[test]
    fn core_polynomial_examples() {
        let cubic = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let (n, core) = core_polynomial(&hayman(&cubic));
        assert_eq!(n, 3);
        assert_eq!(core, cubic);

        let two = Polynomial::from_real(&[1.0, 0.0, 0.0, 0.0, 2.0]);
        let (n, core) = core_polynomial(&hayman(&two));
        assert_eq!(n, 4);
        assert_eq!(core, two);

        // 1 + z^4 + z^6 + z^7 + z^9: prefix gcds 4, 2, 1
        let p = Polynomial::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let (n, core) = core_polynomial(&hayman(&p));
        assert_eq!(n, 7);
        assert_eq!(
            core,
            Polynomial::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0])
        );
    }

    #[test]
    fn reciprocal_examples() {
        let cubic = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(
            reciprocal(&cubic).unwrap().coeffs(),
            &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
        let two = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, -2.0)]);
        assert_eq!(
            reciprocal(&two).unwrap().coeffs(),
            &[c(0.5, -2.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn reciprocal_drops_low_order_zeros() {
        // z + z^2 reverses to 1 + z with the zero constant term discarded
        let p = Polynomial::from_real(&[0.0, 1.0, 1.0]);
        assert_eq!(reciprocal(&p).unwrap(), Polynomial::from_real(&[1.0, 1.0]));
    }

    fn coeff_strategy() -> impl Strategy<Value = Complex64> {
        prop_oneof![
            1 => Just(Complex64::new(0.0, 0.0)),
            3 => (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im)),
        ]
    }

    // normwise: componentwise bounds do not survive complex division
    fn ulps_close(x: Complex64, y: Complex64, ulps: f64) -> bool {
        (x - y).norm() <= ulps * f64::EPSILON * y.norm()
    }

    proptest! {
        #[test]
        fn normalize_reconstructs(coeffs in prop::collection::vec(coeff_strategy(), 1..12)) {
            let p = Polynomial::new(coeffs);
            prop_assume!(p.support().count() >= 2);
            let h = hayman(&p);
            prop_assert_eq!(h.tail.coeff(0), Complex64::new(1.0, 0.0));
            prop_assert!(h.a != Complex64::new(0.0, 0.0));
            for i in 1..h.k {
                prop_assert_eq!(h.tail.coeff(i), Complex64::new(0.0, 0.0));
            }
            let back = h.reconstruct();
            prop_assert_eq!(back.coeffs().len(), p.coeffs().len());
            for (x, y) in back.coeffs().iter().zip(p.coeffs()) {
                prop_assert!(ulps_close(*x, *y, 4.0), "{} vs {}", x, y);
            }
        }

        #[test]
        fn inner_degree_divides_support(coeffs in prop::collection::vec(coeff_strategy(), 1..16)) {
            let p = Polynomial::new(coeffs);
            prop_assume!(p.support().count() >= 2);
            let h = hayman(&p);
            let mu = inner_degree(&h);
            prop_assert_eq!(h.k % mu, 0);
            for n in h.tail.support() {
                prop_assert_eq!(n % mu, 0);
            }
            let (big_n, core) = core_polynomial(&h);
            prop_assert!(big_n >= h.k);
            prop_assert_eq!(inner_degree(&HaymanForm::from_tail(core).unwrap()), mu);
            for shorter in h.k..big_n {
                let prefix = HaymanForm::from_tail(h.tail.truncate(shorter)).unwrap();
                prop_assert!(inner_degree(&prefix) > mu);
            }
        }

        #[test]
        fn reciprocal_is_involution(coeffs in prop::collection::vec(coeff_strategy(), 1..12),
                                    c0 in (0.1f64..2.0, -2.0f64..2.0)) {
            let mut coeffs = coeffs;
            coeffs.insert(0, Complex64::new(c0.0, c0.1));
            let p = Polynomial::new(coeffs);
            let twice = reciprocal(&reciprocal(&p).unwrap()).unwrap();
            prop_assert_eq!(twice, p);
        }
    }
}
