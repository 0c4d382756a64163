//! `N` particles on a ring with `H = sum_i A_i^dagger A_i`,
//! `A_i = d/d theta_i + lambda sum_{j != i} sin(theta_i - theta_j)`
//! (angles `theta = x/L`, coupling `lambda = lambda L^2`, energies in
//! `hbar^2 / (2 m L^2)`).
//!
//! The ground state is `log psi_0 = c lambda sum_{i<j} cos(theta_i - theta_j)`;
//! `c = 1` is annihilated by every `A_i`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::RngState;

/// Acceptance rate below which the sampler gives up.
pub const ACCEPTANCE_FLOOR: f64 = 0.05;
const TUNE_BLOCK: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    n: usize,
    lambda: f64,
    coeff_c: f64,
}

impl RingParams {
    pub fn new(n: usize, lambda_tilde: f64, coeff_c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 particles, got {n}")));
        }
        if !lambda_tilde.is_finite() {
            return Err(Error::InvalidParameter("lambda_tilde must be finite".into()));
        }
        if !(coeff_c > 0.0 && coeff_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("coeff_c must be > 0, got {coeff_c}")));
        }
        Ok(Self {
            n,
            lambda: lambda_tilde,
            coeff_c,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda_tilde(&self) -> f64 {
        self.lambda
    }

    pub fn coeff_c(&self) -> f64 {
        self.coeff_c
    }

    /// Exponent prefactor `c lambda`.
    fn k(&self) -> f64 {
        self.coeff_c * self.lambda
    }
}

/// `c lambda sum_{i<j} cos(theta_i - theta_j)`.
pub fn log_ground_state(theta: &[f64], p: &RingParams) -> Result<f64> {
    if theta.len() != p.n {
        return Err(Error::InvalidParameter(format!(
            "expected {} positions, got {}",
            p.n,
            theta.len()
        )));
    }
    Ok(log_psi(theta, p.k()))
}

fn log_psi(theta: &[f64], k: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..theta.len() {
        for j in i + 1..theta.len() {
            s += (theta[i] - theta[j]).cos();
        }
    }
    k * s
}

/// `(A_i psi_0) / psi_0` with `d/d theta_i` taken by a central difference of step `h`.
fn a_over_psi(theta: &mut [f64], i: usize, p: &RingParams, h: f64) -> f64 {
    let k = p.k();
    let base = log_psi(theta, k);
    let t = theta[i];
    theta[i] = t + h;
    let up = log_psi(theta, k) - base;
    theta[i] = t - h;
    let down = log_psi(theta, k) - base;
    theta[i] = t;
    let deriv = (up.exp() - down.exp()) / (2.0 * h);
    let drift: f64 = (0..theta.len()).filter(|&j| j != i).map(|j| (t - theta[j]).sin()).sum();
    deriv + p.lambda * drift
}

/// Largest `|A_i psi_0| / psi_0` over `n_probe` seeded uniform configurations.
pub fn annihilation_residual(p: &RingParams, n_probe: usize, h: f64, seed: u64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let mut rng = RngState::new(seed);
    let mut worst = 0.0f64;
    let mut theta = vec![0.0; p.n];
    for _ in 0..n_probe {
        theta.iter_mut().for_each(|t| *t = rng.uniform_in(-PI, PI));
        for i in 0..p.n {
            worst = worst.max(a_over_psi(&mut theta, i, p, h).abs());
        }
    }
    Ok(worst)
}

/// Uniform mesh `theta_a = -pi + (a + 1) 2 pi / g` on `(-pi, pi]`.
pub fn ring_mesh(g: usize) -> Vec<f64> {
    (0..g)
        .map(|a| {
            if a + 1 == g {
                PI
            } else {
                -PI + 2.0 * PI * (a + 1) as f64 / g as f64
            }
        })
        .collect()
}

fn check_quad_n(p: &RingParams, what: &'static str) -> Result<()> {
    if p.n > 4 {
        return Err(Error::UnsupportedParticleNumber { n: p.n, what });
    }
    Ok(())
}

fn check_mesh(g: usize, min: usize) -> Result<()> {
    if g < min {
        return Err(Error::InvalidParameter(format!("mesh size must be >= {min}, got {g}")));
    }
    Ok(())
}

/// `<psi_0| H |psi_0> / <psi_0|psi_0> = sum_i ||A_i psi_0||^2 / ||psi_0||^2`
/// on a `g^N` tensor mesh, with `d/d theta_i` from central differences of step `h`.
pub fn ground_energy(p: &RingParams, g: usize, h: f64) -> Result<f64> {
    check_quad_n(p, "the quadrature ground energy (N <= 4)")?;
    check_mesh(g, 8)?;
    let mesh = ring_mesh(g);
    let total = g.pow(p.n as u32);
    // Shift log psi by its maximum so the weights stay in range for either sign of lambda.
    let pairs = (p.n * (p.n - 1) / 2) as f64;
    let shift = p.k().abs() * pairs;
    let (num, den) = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut theta = vec![0.0; p.n];
            for t in theta.iter_mut() {
                *t = mesh[idx % g];
                idx /= g;
            }
            let w = (2.0 * (log_psi(&theta, p.k()) - shift)).exp();
            let a2: f64 = (0..p.n).map(|i| a_over_psi(&mut theta, i, p, h).powi(2)).sum();
            (a2 * w, w)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(num / den)
}

/// Sampling or integration method behind a [`PairCorr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Quadrature => "quad",
            Method::MonteCarlo => "mc",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(Method::Quadrature),
            "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected quad or mc)"
            ))),
        }
    }
}

/// Pair correlation `rho(theta, theta')` on the `g x g` ring mesh, row index
/// `theta`, normalized to peak 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorr {
    pub g: usize,
    pub values: Vec<f64>,
    /// Per-cell standard error (Monte Carlo only), on the same scale as `values`.
    pub stderr: Option<Vec<f64>>,
    pub method: Method,
    pub params: RingParams,
    /// Measured acceptance rate (Monte Carlo only).
    pub acceptance: Option<f64>,
}

impl PairCorr {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.g + b]
    }

    pub fn mesh(&self) -> Vec<f64> {
        ring_mesh(self.g)
    }
}

fn peak_normalize(values: &mut [f64], stderr: Option<&mut Vec<f64>>) {
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        values.iter_mut().for_each(|v| *v /= peak);
        if let Some(s) = stderr {
            s.iter_mut().for_each(|v| *v /= peak);
        }
    }
}

/// Unnormalized marginal `h(m) = rho(theta_m, theta_0)` for mesh index
/// differences `m = 0..g`, by periodic trapezoid quadrature over the
/// remaining coordinates on the same mesh.
///
/// With `u_t = exp(2 c lambda (cos(theta - t) + cos(theta' - t)))` and
/// `K_{ts} = exp(2 c lambda cos(t - s))`, the marginal is
/// `exp(2 c lambda cos(theta - theta'))` times 1, `sum u` or `u^T K u` for
/// `N = 2, 3, 4`. The mesh is shift invariant, so `h` determines every cell.
fn difference_profile(p: &RingParams, g: usize) -> Vec<f64> {
    let two_k = 2.0 * p.k();
    // exp(2 c lambda (cos(delta) - 1)) by index difference, peak-shifted.
    let kern: Vec<f64> = (0..g)
        .map(|m| {
            let m = m.min(g - m);
            (two_k * ((2.0 * PI * m as f64 / g as f64).cos() - 1.0)).exp()
        })
        .collect();
    let kd = |a: usize, b: usize| kern[(a + g - b) % g];
    let half: Vec<f64> = (0..=g / 2)
        .into_par_iter()
        .map(|a| {
            let rest = match p.n {
                2 => 1.0,
                3 => (0..g).map(|t| kd(a, t) * kd(0, t)).sum::<f64>(),
                _ => {
                    let u: Vec<f64> = (0..g).map(|t| kd(a, t) * kd(0, t)).collect();
                    (0..g)
                        .map(|t| u[t] * (0..g).map(|s| kd(t, s) * u[s]).sum::<f64>())
                        .sum::<f64>()
                }
            };
            kd(a, 0) * rest
        })
        .collect();
    (0..g).map(|m| half[m.min(g - m)]).collect()
}

fn from_profile(p: &RingParams, g: usize, h: &[f64]) -> PairCorr {
    let mut values: Vec<f64> = (0..g * g).map(|cell| h[(cell / g + g - cell % g) % g]).collect();
    peak_normalize(&mut values, None);
    PairCorr {
        g,
        values,
        stderr: None,
        method: Method::Quadrature,
        params: *p,
        acceptance: None,
    }
}

/// Pair correlation at the mesh nodes by quadrature (`N <= 4`).
pub fn pair_correlation_quad(p: &RingParams, g: usize) -> Result<PairCorr> {
    check_quad_n(p, "quadrature pair correlation (N <= 4)")?;
    check_mesh(g, 32)?;
    Ok(from_profile(p, g, &difference_profile(p, g)))
}

/// Quadrature estimate of what the Monte Carlo histogram measures: the mean
/// of `rho` over each `g x g` cell, from nodes of a mesh `refine` times finer
/// (`refine` odd so the fine mesh contains the cell centers).
pub fn pair_correlation_cells(p: &RingParams, g: usize, refine: usize) -> Result<PairCorr> {
    check_quad_n(p, "quadrature pair correlation (N <= 4)")?;
    check_mesh(g, 32)?;
    if refine == 0 || refine.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("refine must be odd, got {refine}")));
    }
    let s = refine as i64;
    let fine_g = g * refine;
    let fine = difference_profile(p, fine_g);
    // Averaging both coordinates over s sub-nodes leaves a triangular
    // weight on the fine index difference.
    let h: Vec<f64> = (0..g)
        .map(|m| {
            (-(s - 1)..s)
                .map(|t| {
                    let idx = (m as i64 * s + t).rem_euclid(fine_g as i64) as usize;
                    (s - t.abs()) as f64 * fine[idx]
                })
                .sum::<f64>()
                / (s * s) as f64
        })
        .collect();
    Ok(from_profile(p, g, &h))
}

/// Histogram bin whose center is the mesh node nearest `theta`.
fn bin_of(theta: f64, g: usize) -> usize {
    let step = 2.0 * PI / g as f64;
    let j = ((theta + PI) / step).round() as i64 - 1;
    j.rem_euclid(g as i64) as usize
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

struct ChainResult {
    hist: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

/// Energy change `log psi(new) - log psi(old)` for moving particle `i`.
fn delta_log(theta: &[f64], i: usize, new: f64, k: f64) -> f64 {
    let old = theta[i];
    let mut s = 0.0;
    for (j, t) in theta.iter().enumerate() {
        if j != i {
            s += (new - t).cos() - (old - t).cos();
        }
    }
    k * s
}

fn run_chain(p: &RingParams, g: usize, n_samples: usize, seed: u64, chain: usize) -> ChainResult {
    let mut rng = RngState::stream(seed, chain);
    let n = p.n;
    let k = p.k();
    let mut theta: Vec<f64> = (0..n).map(|_| rng.uniform_in(-PI, PI)).collect();
    let mut width = PI;
    let sweep = |theta: &mut Vec<f64>, width: f64, rng: &mut RngState| -> u64 {
        let mut acc = 0;
        for i in 0..n {
            let new = wrap(theta[i] + width * (rng.uniform() - 0.5));
            let dl = 2.0 * delta_log(theta, i, new, k);
            if dl >= 0.0 || rng.uniform() < dl.exp() {
                theta[i] = new;
                acc += 1;
            }
        }
        acc
    };

    // Burn-in with width tuning toward acceptance 0.4.
    let burn = (n_samples / 10).max(TUNE_BLOCK);
    let mut block_acc = 0u64;
    for s in 1..=burn {
        block_acc += sweep(&mut theta, width, &mut rng);
        if s % TUNE_BLOCK == 0 {
            let rate = block_acc as f64 / (TUNE_BLOCK * n) as f64;
            width = (width * (rate / 0.4).clamp(0.5, 2.0)).min(2.0 * PI);
            block_acc = 0;
        }
    }

    let mut hist = vec![0.0; g * g];
    let mut accepted = 0;
    let mut bins = vec![0usize; n];
    for _ in 0..n_samples {
        accepted += sweep(&mut theta, width, &mut rng);
        for (b, t) in bins.iter_mut().zip(&theta) {
            *b = bin_of(*t, g);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    hist[bins[i] * g + bins[j]] += 1.0;
                }
            }
        }
    }
    ChainResult {
        hist,
        accepted,
        proposed: (n_samples * n) as u64,
    }
}

/// Metropolis estimate of the pair correlation on the `g x g` mesh.
///
/// Each chain runs `n_samples` recorded sweeps (one single-particle
/// proposal per particle) after a discarded burn-in of 10% during which the
/// proposal width is tuned. Chains use independent streams of `seed`; their
/// normalized histograms are averaged in chain order, and the standard
/// error comes from the spread between chains.
pub fn pair_correlation_mc(p: &RingParams, g: usize, n_samples: usize, n_chains: usize, seed: u64) -> Result<PairCorr> {
    check_mesh(g, 8)?;
    if n_chains < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 chains, got {n_chains}"
        )));
    }
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 samples per chain, got {n_samples}"
        )));
    }
    let chains: Vec<ChainResult> = (0..n_chains)
        .into_par_iter()
        .map(|c| run_chain(p, g, n_samples, seed, c))
        .collect();
    let accepted: u64 = chains.iter().map(|c| c.accepted).sum();
    let proposed: u64 = chains.iter().map(|c| c.proposed).sum();
    let acceptance = accepted as f64 / proposed as f64;
    if acceptance < ACCEPTANCE_FLOOR {
        return Err(Error::PathologicalAcceptance {
            acceptance,
            floor: ACCEPTANCE_FLOOR,
        });
    }
    let cells = g * g;
    let mut mean = vec![0.0; cells];
    let mut sq = vec![0.0; cells];
    let mut counts = vec![0.0; cells];
    let mut grand = 0.0;
    for c in &chains {
        let total: f64 = c.hist.iter().sum();
        grand += total;
        for (i, h) in c.hist.iter().enumerate() {
            let f = h / total;
            mean[i] += f;
            sq[i] += f * f;
            counts[i] += h;
        }
    }
    let nc = n_chains as f64;
    let per_chain = grand / nc;
    let between = |m: f64, s: f64| {
        let mu = m / nc;
        ((s / nc - mu * mu) * nc / (nc - 1.0)).max(0.0)
    };
    // Overdispersion of the per-chain cell fractions relative to Poisson
    // counting (autocorrelated sweeps, several pairs per sweep), measured
    // on well-populated cells.
    let mut ratios: Vec<f64> = (0..cells)
        .filter(|&i| counts[i] >= 1000.0)
        .map(|i| between(mean[i], sq[i]) / (mean[i] / nc / per_chain))
        .collect();
    ratios.sort_by(f64::total_cmp);
    let kappa = ratios.get(ratios.len() / 2).copied().unwrap_or(1.0).max(1.0);
    // Between-chain spread, floored by the overdispersed counting error of
    // at least one pooled count, so sparse cells never report a vanishing
    // uncertainty.
    let mut stderr: Vec<f64> = (0..cells)
        .map(|i| {
            let floor = (kappa * counts[i].max(1.0)).sqrt() / grand;
            (between(mean[i], sq[i]) / nc).sqrt().max(floor)
        })
        .collect();
    mean.iter_mut().for_each(|m| *m /= nc);
    peak_normalize(&mut mean, Some(&mut stderr));
    Ok(PairCorr {
        g,
        values: mean,
        stderr: Some(stderr),
        method: Method::MonteCarlo,
        params: *p,
        acceptance: Some(acceptance),
    })
}

/// `rho_hat(delta)` for `delta = theta - theta'` on the mesh differences,
/// averaged over cells and normalized to peak 1, ordered by `delta` in `(-pi, pi]`.
pub fn radial_profile(pc: &PairCorr) -> Vec<(f64, f64)> {
    let g = pc.g;
    let mut sums = vec![0.0; g];
    for a in 0..g {
        for b in 0..g {
            sums[(a + g - b) % g] += pc.get(a, b);
        }
    }
    let peak = sums.iter().cloned().fold(0.0, f64::max);
    // Difference index m maps to delta = 2 pi m / g, wrapped.
    let mut out: Vec<(f64, f64)> = sums
        .iter()
        .enumerate()
        .map(|(m, s)| {
            let delta = if 2 * m == g {
                PI
            } else {
                wrap(2.0 * PI * m as f64 / g as f64)
            };
            (delta, if peak > 0.0 { s / peak } else { 0.0 })
        })
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// `1 - |sum rho e^{i delta}| / sum rho` of a radial profile.
pub fn circular_variance(profile: &[(f64, f64)]) -> f64 {
    let total: f64 = profile.iter().map(|(_, r)| r).sum();
    let resultant: Complex64 = profile.iter().map(|(d, r)| Complex64::from_polar(*r, *d)).sum();
    1.0 - resultant.norm() / total
}
