//! Compensated summation and the periodic trapezoid rule.
//!
//! On a uniform grid covering one full period the trapezoid rule reduces to
//! `spacing * sum(f)`. It is exact for trigonometric polynomials below the
//! Nyquist degree and converges geometrically for analytic periodic
//! integrands, which is why every periodic integral in the crate goes
//! through it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
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

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of real values.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Compensated sum of complex values (real and imaginary parts separately).
pub fn sum_complex(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for z in values {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Integral over one period of length `period` from `samples` taken on a
/// uniform grid of that period (one endpoint only).
pub fn periodic_integral(samples: &[f64], period: f64) -> Result<f64> {
    if samples.len() < 8 {
        return Err(Error::InvalidParameter(format!(
            "periodic_integral needs at least 8 samples, got {}",
            samples.len()
        )));
    }
    let spacing = period / samples.len() as f64;
    Ok(spacing * sum(samples.iter().copied()))
}

/// Samples `f` on the uniform grid `theta_j = -pi + (j + 1) * 2 pi / n` of
/// `(-pi, pi]` and integrates it over the period.
pub fn integrate_periodic_fn(f: impl Fn(f64) -> f64, n: usize) -> Result<f64> {
    let samples: Vec<f64> = angle_grid(n).map(f).collect();
    periodic_integral(&samples, 2.0 * PI)
}

/// Uniform grid on `(-pi, pi]` with the endpoint `pi` included.
pub fn angle_grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    let h = 2.0 * PI / n as f64;
    (0..n).map(move |j| -PI + (j + 1) as f64 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series of I_0, used as an oracle for the quadrature.
    fn bessel_i0(x: f64) -> f64 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut total = 1.0;
        for k in 1..200 {
            term *= q / (k as f64 * k as f64);
            total += term;
            if term < 1e-18 * total {
                break;
            }
        }
        total
    }

    #[test]
    fn cosine_integrates_to_zero() {
        let v = integrate_periodic_fn(f64::cos, 64).unwrap();
        assert!(v.abs() < 1e-14, "{v}");
    }

    #[test]
    fn constant_integrates_to_period() {
        let v = integrate_periodic_fn(|_| 1.0, 16).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn exp_cos_matches_bessel_series() {
        let v = integrate_periodic_fn(|t| (-2.0 * t.cos()).exp(), 512).unwrap();
        let expect = 2.0 * PI * bessel_i0(2.0);
        assert!((v - expect).abs() / expect < 1e-10, "{v} vs {expect}");
    }

    #[test]
    fn spectral_convergence_on_exp_cos() {
        let lambda = 1.5;
        let expect = 2.0 * PI * bessel_i0(2.0 * lambda);
        let mut prev = f64::INFINITY;
        for n in [8usize, 16, 32] {
            let v = integrate_periodic_fn(|t| (-2.0 * lambda * t.cos()).exp(), n).unwrap();
            let err = (v - expect).abs() / expect;
            if prev > 1e-13 {
                assert!(err * 100.0 <= prev || err < 1e-14, "n={n}: {err} vs {prev}");
            }
            prev = err;
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(periodic_integral(&[1.0; 4], 1.0).is_err());
    }

    #[test]
    fn compensated_beats_naive() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(xs), 2.0);
    }
}
