//! Zero-energy scattering off a delta impurity in the periodic potential
//! `V(theta) = v0 sin^2 theta - sqrt(v0/2) cos theta` (angle `theta = x/L`,
//! energies in `hbar^2 / (m L^2)`).
//!
//! The periodic zero-energy solution is `psi_0 = exp(lambda cos theta)`
//! with `lambda = sqrt(2 v0)`. The second, aperiodic one is
//! `psi_0 Phi` with `Phi' = exp(-2 lambda cos theta)`, `Phi(0) = 0`.
//! Matching the two across the impurity at `theta_0` gives the
//! dimensionless scattering length
//! `a_bar = lambda sin(theta_0) Phi(theta_0) - exp(-2 lambda cos theta_0)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::dft::{dft_in_place, Sign};

/// Smallest accepted quadrature resolution.
pub const MIN_RESOLUTION: usize = 64;
/// Default quadrature resolution.
pub const DEFAULT_RESOLUTION: usize = 4096;

/// `v0 sin^2 theta - sqrt(v0/2) cos theta`.
pub fn potential(theta: f64, v0: f64) -> Result<f64> {
    check_depth(v0)?;
    let s = theta.sin();
    Ok(v0 * s * s - (0.5 * v0).sqrt() * theta.cos())
}

fn check_depth(v0: f64) -> Result<()> {
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::InvalidParameter(format!("v0 must be finite and >= 0, got {v0}")));
    }
    Ok(())
}

/// `lambda_L = sqrt(2 v0)`.
pub fn lambda_of(v0: f64) -> f64 {
    (2.0 * v0).sqrt()
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterParams {
    v0: f64,
    lambda: f64,
    theta0: f64,
    quad_points: usize,
}

impl ScatterParams {
    /// `theta0` is wrapped into `(-pi, pi]`.
    pub fn new(v0: f64, theta0: f64, quad_points: usize) -> Result<Self> {
        check_depth(v0)?;
        check_resolution(quad_points)?;
        if !theta0.is_finite() {
            return Err(Error::InvalidParameter("theta0 must be finite".into()));
        }
        Ok(Self {
            v0,
            lambda: lambda_of(v0),
            theta0: wrap_angle(theta0),
            quad_points,
        })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < MIN_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "quadrature resolution must be >= {MIN_RESOLUTION}, got {n}"
        )));
    }
    Ok(())
}

/// `Phi(theta) = beta theta + sum_k b_k sin(k theta)`, the antiderivative of
/// `exp(-2 lambda cos theta)` vanishing at 0.
///
/// The cosine coefficients of the integrand come from the trapezoid rule on
/// `resolution` uniform points (spectrally accurate for this entire periodic
/// function) and are integrated term by term.
#[derive(Debug, Clone)]
pub struct AperiodicPhi {
    lambda: f64,
    beta: f64,
    /// `b_k` for `k = 1..`.
    sine: Vec<f64>,
}

impl AperiodicPhi {
    pub fn new(lambda: f64, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite".into()));
        }
        let n = resolution;
        let mut f: Vec<Complex64> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                Complex64::new((-2.0 * lambda * t.cos()).exp(), 0.0)
            })
            .collect();
        dft_in_place(&mut f, Sign::Negative);
        // f(theta) = c_0 + 2 sum_k c_k cos(k theta), c_k = Re F_k / n.
        let c: Vec<f64> = f.iter().take(n / 2 + 1).map(|z| z.re / n as f64).collect();
        let beta = c[0];
        let cutoff = 1e-18 * beta;
        let last = (1..c.len()).rev().find(|&k| c[k].abs() > cutoff).unwrap_or(0);
        let sine = (1..=last)
            .map(|k| {
                let weight = if 2 * k == n { 1.0 } else { 2.0 };
                weight * c[k] / k as f64
            })
            .collect();
        Ok(Self { lambda, beta, sine })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Period mean of the integrand; `Phi(theta + 2 pi) = Phi(theta) + 2 pi beta`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.beta * theta
            + self
                .sine
                .iter()
                .enumerate()
                .map(|(i, b)| b * ((i + 1) as f64 * theta).sin())
                .sum::<f64>()
    }

    /// `(psi_0 Phi)' / psi_0 = -lambda sin(theta) Phi + exp(-2 lambda cos theta)`.
    pub fn log_derivative(&self, theta: f64) -> f64 {
        -self.lambda * theta.sin() * self.eval(theta) + (-2.0 * self.lambda * theta.cos()).exp()
    }

    /// Dimensionless scattering length at impurity angle `theta0`.
    ///
    /// The aperiodic solution is anchored at the potential minimum of the
    /// impurity's own cell, so `theta0` is first wrapped into `(-pi, pi]`.
    pub fn a_bar(&self, theta0: f64) -> f64 {
        -self.log_derivative(wrap_angle(theta0))
    }
}

pub fn aperiodic_phi(theta: f64, lambda: f64, resolution: usize) -> Result<f64> {
    Ok(AperiodicPhi::new(lambda, resolution)?.eval(theta))
}

pub fn scattering_length(params: &ScatterParams) -> Result<f64> {
    Ok(AperiodicPhi::new(params.lambda, params.quad_points)?.a_bar(params.theta0))
}

/// A scattering-length curve over impurity positions.
#[derive(Debug, Clone)]
pub struct ScatterResult {
    pub theta0: Vec<f64>,
    pub a_bar: Vec<f64>,
    pub beta: f64,
    pub v0: f64,
    pub resolution: usize,
}

impl ScatterResult {
    /// Value at `theta0 = 0` (present whenever `n_theta` is even).
    pub fn at_origin(&self) -> Option<f64> {
        self.theta0.iter().position(|t| *t == 0.0).map(|i| self.a_bar[i])
    }

    pub fn max(&self) -> f64 {
        self.a_bar.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Uniform impurity grid `theta_i = -pi + (i + 1) 2 pi / n` over `(-pi, pi]`.
/// Exact zero is used for the middle node of even grids.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if 2 * (i + 1) == n {
                0.0
            } else if i + 1 == n {
                PI
            } else {
                -PI + 2.0 * PI * (i + 1) as f64 / n as f64
            }
        })
        .collect()
}

pub fn scattering_sweep(v0: f64, n_theta: usize, resolution: usize) -> Result<ScatterResult> {
    check_depth(v0)?;
    if n_theta < 16 {
        return Err(Error::InvalidParameter(format!("n_theta must be >= 16, got {n_theta}")));
    }
    let phi = AperiodicPhi::new(lambda_of(v0), resolution)?;
    let theta0 = theta_grid(n_theta);
    let a_bar = theta0.par_iter().map(|t| phi.a_bar(*t)).collect();
    Ok(ScatterResult {
        theta0,
        a_bar,
        beta: phi.beta(),
        v0,
        resolution,
    })
}

/// `(lambda, a_bar(0))` over the given couplings, computed through the
/// quadrature path (closed form `-exp(-2 lambda)`).
pub fn origin_curve(lambdas: &[f64], resolution: usize) -> Result<Vec<(f64, f64)>> {
    lambdas
        .par_iter()
        .map(|&l| Ok((l, AperiodicPhi::new(l, resolution)?.a_bar(0.0))))
        .collect()
}

/// Derivative jump of the matched zero-energy solution at the impurity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaJump {
    /// `f'(theta0+) - f'(theta0-)` by one-sided differences.
    pub measured: f64,
    /// `2 g f(theta0)` with `g = 1`.
    pub expected: f64,
}

/// Builds `f = psi_0 - |psi_I - psi_I(theta0)| / a` with `g = 1` (so `a = a_bar`)
/// and differentiates it numerically on both sides of `theta0` with step `h`.
pub fn delta_condition(params: &ScatterParams, h: f64) -> Result<DeltaJump> {
    let phi = AperiodicPhi::new(params.lambda, params.quad_points)?;
    let a = phi.a_bar(params.theta0);
    let lam = params.lambda;
    let t0 = params.theta0;
    let psi0 = |t: f64| (lam * t.cos()).exp();
    let psi_i = |t: f64| psi0(t) * phi.eval(t);
    let f = |t: f64| psi0(t) - (psi_i(t) - psi_i(t0)).abs() / a;
    let right = (-3.0 * f(t0) + 4.0 * f(t0 + h) - f(t0 + 2.0 * h)) / (2.0 * h);
    let left = (3.0 * f(t0) - 4.0 * f(t0 - h) + f(t0 - 2.0 * h)) / (2.0 * h);
    Ok(DeltaJump {
        measured: right - left,
        expected: 2.0 * f(t0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson rule for `int_0^theta exp(-2 lambda cos t) dt`.
    fn simpson_phi(theta: f64, lambda: f64, panels: usize) -> f64 {
        let h = theta / panels as f64;
        let f = |t: f64| (-2.0 * lambda * t.cos()).exp();
        let mut s = f(0.0) + f(theta);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn potential_values() {
        assert_eq!(potential(1.2, 0.0).unwrap(), 0.0);
        assert!((potential(0.0, 0.5).unwrap() + 0.5).abs() < 1e-15);
        assert!(potential(0.0, -1.0).is_err());
        let v = potential(0.4, 2.0).unwrap();
        assert!((potential(0.4 + 2.0 * PI, 2.0).unwrap() - v).abs() < 1e-13);
    }

    #[test]
    fn ground_state_has_zero_energy() {
        for v0 in [0.5, 1.5, 3.0] {
            let lam = lambda_of(v0);
            let h = 1e-3;
            let psi = |t: f64| (lam * t.cos()).exp();
            for i in 0..200 {
                let t = -PI + 2.0 * PI * i as f64 / 200.0;
                let d2 = (-psi(t + 2.0 * h) + 16.0 * psi(t + h) - 30.0 * psi(t) + 16.0 * psi(t - h) - psi(t - 2.0 * h))
                    / (12.0 * h * h);
                let r = -0.5 * d2 + potential(t, v0).unwrap() * psi(t);
                assert!(r.abs() / psi(t) < 1e-8, "v0 {v0}, t {t}: {r}");
            }
        }
    }

    #[test]
    fn phi_is_identity_without_potential() {
        let p = AperiodicPhi::new(0.0, 64).unwrap();
        for t in [-3.0, -0.5, 0.0, 1.0, 2.9] {
            assert_eq!(p.eval(t), t);
        }
    }

    #[test]
    fn beta_is_bessel_mean() {
        // I_0(2) from the power series sum (1)^k / (k!)^2.
        let mut term = 1.0;
        let mut i0 = 1.0;
        for k in 1..40 {
            term /= (k * k) as f64;
            i0 += term;
        }
        let p = AperiodicPhi::new(1.0, 256).unwrap();
        assert!((p.beta() - i0).abs() < 1e-8);
        assert!((i0 - 2.279_585_302_336_067).abs() < 1e-14);
    }

    #[test]
    fn phi_is_odd_and_quasi_periodic() {
        let p = AperiodicPhi::new(1.3, 1024).unwrap();
        assert!((p.eval(-1.3) + p.eval(1.3)).abs() < 1e-13);
        assert_eq!(p.eval(0.0), 0.0);
        let t = 0.77;
        let jump = p.eval(t + 2.0 * PI) - p.eval(t);
        assert!((jump - 2.0 * PI * p.beta()).abs() < 1e-10);
    }

    #[test]
    fn phi_matches_simpson() {
        let lam = 3f64.sqrt();
        let p = AperiodicPhi::new(lam, 4096).unwrap();
        for t in [0.3, 1.3, PI / 2.0, 2.5, 3.0] {
            let s = simpson_phi(t, lam, 20_000);
            assert!((p.eval(t) - s).abs() < 1e-10 * s.abs().max(1.0), "{t}");
        }
    }

    #[test]
    fn golden_value_at_quarter_turn() {
        // Adaptive quadrature reference and composite Simpson agree here.
        let golden = -0.457_105_320_981_003_3;
        let lam = 3f64.sqrt();
        let simpson = lam * simpson_phi(PI / 2.0, lam, 40_000) - 1.0;
        assert!((simpson - golden).abs() < 1e-12);
        let a = scattering_length(&ScatterParams::new(1.5, PI / 2.0, 4096).unwrap()).unwrap();
        assert!((a - golden).abs() < 1e-10, "{a}");
    }

    #[test]
    fn origin_closed_form() {
        let a = scattering_length(&ScatterParams::new(0.5, 0.0, 4096).unwrap()).unwrap();
        assert!((a + (-2.0f64).exp()).abs() < 1e-12);
        let curve = origin_curve(&[0.1, 0.5, 1.0, 2.0, 4.0], 4096).unwrap();
        for (l, a) in curve {
            assert!((a + (-2.0 * l).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn free_limit_is_minus_one() {
        let r = scattering_sweep(0.0, 64, 512).unwrap();
        assert!(r.a_bar.iter().all(|a| (a + 1.0).abs() < 1e-12));
    }

    #[test]
    fn sweep_is_even_and_resolved() {
        let r = scattering_sweep(1.5, 64, 4096).unwrap();
        let fine = scattering_sweep(1.5, 64, 8192).unwrap();
        let n = r.theta0.len();
        for i in 0..n - 1 {
            let mirror = n - 2 - i;
            assert!((r.theta0[i] + r.theta0[mirror]).abs() < 1e-14);
            assert!((r.a_bar[i] - r.a_bar[mirror]).abs() < 1e-10);
            assert!((r.a_bar[i] - fine.a_bar[i]).abs() < 1e-9);
        }
        assert_eq!(r.theta0[n - 1], PI);
    }

    #[test]
    fn periodic_in_impurity_position() {
        let p = AperiodicPhi::new(lambda_of(1.0), 4096).unwrap();
        for t in [-2.0, 0.4, 1.9] {
            assert!((p.a_bar(t) - p.a_bar(t + 2.0 * PI)).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_jump_matches() {
        for (v0, t0) in [(0.5, 0.0), (1.5, 1.1), (1.0, -2.4)] {
            let p = ScatterParams::new(v0, t0, 4096).unwrap();
            let j = delta_condition(&p, 1e-4).unwrap();
            assert!(
                (j.measured - j.expected).abs() < 1e-6 * j.expected.abs().max(1.0),
                "{j:?}"
            );
        }
    }

    #[test]
    fn theta_grid_contains_origin_and_pi() {
        let g = theta_grid(16);
        assert_eq!(g[7], 0.0);
        assert_eq!(g[15], PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn bad_inputs() {
        assert!(scattering_sweep(1.0, 8, 4096).is_err());
        assert!(AperiodicPhi::new(1.0, 32).is_err());
        assert!(ScatterParams::new(-1.0, 0.0, 4096).is_err());
    }
}
