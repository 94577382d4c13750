//! `|f(r e^{iθ})|^2` as a finite trigonometric sum in θ.
//!
//! With `f = Σ a_ℓ z^ℓ`,
//!
//! ```text
//! |f(re^{iθ})|^2 = Σ_ℓ |a_ℓ|^2 r^{2ℓ}
//!                + Σ_{j<ℓ} 2|a_j||a_ℓ| r^{j+ℓ} cos((ℓ-j)θ - (arg a_j - arg a_ℓ))
//! ```
//!
//! The first sum does not depend on θ. Maximizers on a circle only care about
//! the second one, which is `O(r^k)` near the origin while the first is
//! `1 + O(r^{2k})`; keeping them apart is what lets near-ties be resolved well
//! below the rounding level of `|f|^2` itself.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::poly::Polynomial;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `|a_ℓ|^2 r^{2ℓ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalTerm {
    pub power: usize,
    pub weight: f64,
}

/// `amplitude · r^power · cos(frequency·θ - phase)` for the pair `j < ℓ`,
/// with `power = j + ℓ`, `amplitude = 2|a_j||a_ℓ|`, `frequency = ℓ - j` and
/// `phase = arg a_j - arg a_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerm {
    pub power: usize,
    pub amplitude: f64,
    pub frequency: usize,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusExpansion {
    pub diagonal: Vec<DiagonalTerm>,
    pub cross: Vec<CrossTerm>,
    max_power: usize,
}

fn powers(r: f64, max_power: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_power + 1);
    let mut x = 1.0;
    for _ in 0..=max_power {
        out.push(x);
        x *= r;
    }
    out
}

fn reduce_angle(theta: f64) -> f64 {
    if (0.0..TAU).contains(&theta) {
        theta
    } else {
        theta.rem_euclid(TAU)
    }
}

pub fn expand(p: &Polynomial) -> ModulusExpansion {
    let support: Vec<(usize, Complex64)> = p.support().map(|n| (n, p.coeff(n))).collect();
    let diagonal = support
        .iter()
        .map(|&(n, c)| DiagonalTerm {
            power: 2 * n,
            weight: c.norm_sqr(),
        })
        .collect();
    let mut cross = Vec::with_capacity(support.len() * support.len().saturating_sub(1) / 2);
    for (i, &(j, aj)) in support.iter().enumerate() {
        for &(l, al) in &support[i + 1..] {
            cross.push(CrossTerm {
                power: j + l,
                amplitude: 2.0 * aj.norm() * al.norm(),
                frequency: l - j,
                phase: aj.arg() - al.arg(),
            });
        }
    }
    cross.sort_by_key(|t| t.power);
    ModulusExpansion {
        diagonal,
        cross,
        max_power: 2 * p.degree().unwrap_or(0),
    }
}

impl ModulusExpansion {
    pub fn term_count(&self) -> usize {
        self.diagonal.len() + self.cross.len()
    }

    /// θ-independent part `Σ |a_ℓ|^2 r^{2ℓ}`.
    pub fn radial(&self, r: f64) -> f64 {
        let pw = powers(r, self.max_power);
        self.diagonal
            .iter()
            .map(|t| t.weight * pw[t.power])
            .collect::<CompensatedSum>()
            .value()
    }

    /// θ-dependent part: the cross terms only.
    pub fn angular(&self, r: f64, theta: f64) -> f64 {
        let pw = powers(r, self.max_power);
        self.angular_with(&pw, reduce_angle(theta))
    }

    fn angular_with(&self, pw: &[f64], theta: f64) -> f64 {
        self.cross
            .iter()
            .map(|t| t.amplitude * pw[t.power] * (t.frequency as f64 * theta - t.phase).cos())
            .collect::<CompensatedSum>()
            .value()
    }

    /// `|f(re^{iθ})|^2`, accumulated in ascending powers of `r`.
    pub fn mod2(&self, r: f64, theta: f64) -> f64 {
        let pw = powers(r, self.max_power);
        let theta = reduce_angle(theta);
        let mut acc = CompensatedSum::new();
        let (mut d, mut c) = (0, 0);
        while d < self.diagonal.len() || c < self.cross.len() {
            let take_diag = match (self.diagonal.get(d), self.cross.get(c)) {
                (Some(dt), Some(ct)) => dt.power <= ct.power,
                (Some(_), None) => true,
                _ => false,
            };
            if take_diag {
                let t = self.diagonal[d];
                acc.add(t.weight * pw[t.power]);
                d += 1;
            } else {
                let t = self.cross[c];
                acc.add(t.amplitude * pw[t.power] * (t.frequency as f64 * theta - t.phase).cos());
                c += 1;
            }
        }
        acc.value()
    }

    /// `∂/∂θ |f(re^{iθ})|^2`, exact termwise.
    pub fn dmod2_dtheta(&self, r: f64, theta: f64) -> f64 {
        let pw = powers(r, self.max_power);
        let theta = reduce_angle(theta);
        self.cross
            .iter()
            .map(|t| {
                let w = t.frequency as f64;
                t.amplitude * pw[t.power] * w * (t.phase - w * theta).sin()
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// `∂²/∂θ² |f(re^{iθ})|^2`, exact termwise.
    pub fn d2mod2_dtheta2(&self, r: f64, theta: f64) -> f64 {
        let pw = powers(r, self.max_power);
        let theta = reduce_angle(theta);
        self.cross
            .iter()
            .map(|t| {
                let w = t.frequency as f64;
                -t.amplitude * pw[t.power] * w * w * (w * theta - t.phase).cos()
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// `∂²/∂r∂θ |f(re^{iθ})|^2`; with the second θ-derivative this gives the
    /// slope `dθ/dr` of a curve of critical points.
    pub fn d2mod2_dtheta_dr(&self, r: f64, theta: f64) -> f64 {
        let pw = powers(r, self.max_power);
        let theta = reduce_angle(theta);
        self.cross
            .iter()
            .filter(|t| t.power > 0)
            .map(|t| {
                let w = t.frequency as f64;
                t.amplitude * t.power as f64 * pw[t.power - 1] * w * (t.phase - w * theta).sin()
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// Angular value with first and second θ-derivatives in one pass.
    pub fn angular_jet(&self, r: f64, theta: f64) -> (f64, f64, f64) {
        let pw = powers(r, self.max_power);
        let theta = reduce_angle(theta);
        let (mut v, mut d1, mut d2) = (
            CompensatedSum::new(),
            CompensatedSum::new(),
            CompensatedSum::new(),
        );
        for t in &self.cross {
            let w = t.frequency as f64;
            let amp = t.amplitude * pw[t.power];
            let (s, c) = (w * theta - t.phase).sin_cos();
            v.add(amp * c);
            d1.add(-amp * w * s);
            d2.add(-amp * w * w * c);
        }
        (v.value(), d1.value(), d2.value())
    }

    /// Upper bound for `|∂θ mod2|` on the circle of radius `r`; the natural
    /// unit for derivative tolerances.
    pub fn derivative_scale(&self, r: f64) -> f64 {
        let pw = powers(r, self.max_power);
        self.cross
            .iter()
            .map(|t| t.amplitude * pw[t.power] * t.frequency as f64)
            .sum()
    }

    /// Upper bound for the oscillation of `mod2` on the circle of radius `r`.
    pub fn angular_scale(&self, r: f64) -> f64 {
        let pw = powers(r, self.max_power);
        self.cross.iter().map(|t| t.amplitude * pw[t.power]).sum()
    }
}

/// `|p(re^{iθ})|^2` by Horner evaluation; the cross-check for [`ModulusExpansion::mod2`].
pub fn direct_mod2(p: &Polynomial, r: f64, theta: f64) -> f64 {
    p.eval(Complex64::from_polar(r, theta)).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fig1a() -> Polynomial {
        Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)])
    }

    #[test]
    fn constant_expansion() {
        let e = expand(&Polynomial::from_real(&[1.0]));
        assert_eq!(
            e.diagonal,
            vec![DiagonalTerm {
                power: 0,
                weight: 1.0
            }]
        );
        assert!(e.cross.is_empty());
    }

    #[test]
    fn linear_expansion() {
        let e = expand(&Polynomial::from_real(&[1.0, 1.0]));
        assert_eq!(
            e.diagonal,
            vec![
                DiagonalTerm {
                    power: 0,
                    weight: 1.0
                },
                DiagonalTerm {
                    power: 2,
                    weight: 1.0
                }
            ]
        );
        assert_eq!(
            e.cross,
            vec![CrossTerm {
                power: 1,
                amplitude: 2.0,
                frequency: 1,
                phase: 0.0
            }]
        );
        assert_eq!(e.mod2(1.0, 0.0), 4.0);
        assert!(e.mod2(1.0, PI).abs() < 1e-15);
    }

    #[test]
    fn term_count_is_t_plus_pairs() {
        let e = expand(&fig1a());
        assert_eq!(e.diagonal.len(), 3);
        assert_eq!(e.cross.len(), 3);
        // |1 + 1 + i|^2
        assert!((e.mod2(1.0, 0.0) - 5.0).abs() < 1e-14);
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 3.0, 4.0, 0.0, 5.0]);
        assert_eq!(expand(&p).term_count(), 5 + 10);
    }

    #[test]
    fn small_radius_matches_direct() {
        let p = fig1a();
        let e = expand(&p);
        let direct = direct_mod2(&p, 0.1, 0.0);
        assert!((e.mod2(0.1, 0.0) - direct).abs() <= 1e-14 * direct);
    }

    #[test]
    fn derivatives_vanish_at_origin() {
        let e = expand(&fig1a());
        for theta in [0.0, 1.0, -2.5] {
            assert_eq!(e.dmod2_dtheta(0.0, theta), 0.0);
            assert_eq!(e.d2mod2_dtheta2(0.0, theta), 0.0);
        }
    }

    #[test]
    fn two_term_derivative_is_leading_formula() {
        // 1 + a z^3
        let a = Complex64::from_polar(1.7, 0.9);
        let p = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), a]);
        let e = expand(&p);
        for &(r, theta) in &[(0.3f64, 0.1), (0.05, -2.0), (0.9, FRAC_PI_2)] {
            let expect = -2.0 * a.norm() * 3.0 * r.powi(3) * (3.0 * theta + a.arg()).sin();
            assert!((e.dmod2_dtheta(r, theta) - expect).abs() <= 1e-14 * expect.abs().max(1e-3));
        }
    }

    #[test]
    fn periodic_in_theta() {
        let e = expand(&Polynomial::new(vec![
            c(1.0, 0.5),
            c(-0.3, 0.2),
            c(0.0, 2.0),
        ]));
        for theta in [0.3, -1.2, 3.0] {
            for shift in [TAU, -TAU, 5.0 * TAU] {
                assert!((e.mod2(0.7, theta) - e.mod2(0.7, theta + shift)).abs() < 1e-13);
                assert!(
                    (e.dmod2_dtheta(0.7, theta) - e.dmod2_dtheta(0.7, theta + shift)).abs() < 1e-13
                );
            }
        }
    }

    #[test]
    fn jet_agrees_with_separate_calls() {
        let e = expand(&fig1a());
        let (v, d1, d2) = e.angular_jet(0.2, 0.4);
        assert!((v + e.radial(0.2) - e.mod2(0.2, 0.4)).abs() < 1e-15);
        assert!((d1 - e.dmod2_dtheta(0.2, 0.4)).abs() < 1e-15);
        assert!((d2 - e.d2mod2_dtheta2(0.2, 0.4)).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let s: CompensatedSum = [1.0, 1e-17, -1.0, 3e-17].into_iter().collect();
        assert!((s.value() - 4e-17).abs() < 1e-30);
    }
}
