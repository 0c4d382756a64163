//! Lattice position, momentum and ladder operators, the number operator in
//! both representations, its spectrum, the analytic ground state, the
//! uncertainty relations and the lattice Hermite equation.
//!
//! In oscillator units the quadratures coincide with position and
//! momentum: `X = x`, `P = p = sin(kd)/d`, and `a = (X + iP)/sqrt(2)`.
//! Position acts exactly as `i d/dk`, i.e. as multiplication by `n d` on
//! lattice sites.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{inner_product, KGrid, OscParams, WaveK};
use crate::numerics::banded::{eigh, eigvalsh, BandedSym};
use crate::numerics::diff::StencilOrder;
use crate::numerics::quad;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One of the six single-particle operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderAction {
    /// `x = i d/dk`.
    Position,
    /// `p = sin(kd)/d`.
    Momentum,
    /// Dimensionless position quadrature (equal to `x` in oscillator units).
    QuadX,
    /// Dimensionless momentum quadrature (equal to `p` in oscillator units).
    QuadP,
    Annihilation,
    Creation,
}

impl LadderAction {
    pub const ALL: [LadderAction; 6] = [
        LadderAction::Position,
        LadderAction::Momentum,
        LadderAction::QuadX,
        LadderAction::QuadP,
        LadderAction::Annihilation,
        LadderAction::Creation,
    ];
}

fn position(psi: &WaveK) -> WaveK {
    let d = psi.grid().d();
    psi.apply_site_multiplier(|n| n as f64 * d)
}

fn momentum(psi: &WaveK) -> WaveK {
    let d = psi.grid().d();
    psi.map(|k, z| z * ((k * d).sin() / d))
}

/// `(x +- i p) psi / sqrt(2)`.
fn ladder(psi: &WaveK, sign: f64) -> WaveK {
    let x = position(psi);
    let d = psi.grid().d();
    let values = x
        .values()
        .iter()
        .zip(psi.values())
        .enumerate()
        .map(|(j, (xv, v))| {
            let p = (psi.grid().phase(j)).sin() / d;
            (xv + sign * I * p * v) * FRAC_1_SQRT_2
        })
        .collect();
    WaveK::new(*psi.grid(), values).expect("ladder output has grid length")
}

pub fn apply_operator(op: LadderAction, psi: &WaveK) -> WaveK {
    match op {
        LadderAction::Position | LadderAction::QuadX => position(psi),
        LadderAction::Momentum | LadderAction::QuadP => momentum(psi),
        LadderAction::Annihilation => ladder(psi, 1.0),
        LadderAction::Creation => ladder(psi, -1.0),
    }
}

/// `(XP - PX) psi`; equals `i cos(kd) psi` for states well inside the site window.
pub fn commutator_xp(psi: &WaveK) -> WaveK {
    let xp = position(&momentum(psi));
    let px = momentum(&position(psi));
    xp.sub(&px).expect("same grid")
}

/// `(a a^dagger - a^dagger a) psi`; equals `cos(kd) psi` on band-limited states.
pub fn commutator_ladder(psi: &WaveK) -> WaveK {
    let a = LadderAction::Annihilation;
    let c = LadderAction::Creation;
    let aad = apply_operator(a, &apply_operator(c, psi));
    let ada = apply_operator(c, &apply_operator(a, psi));
    aad.sub(&ada).expect("same grid")
}

/// `N psi = a^dagger a psi`, with the exact operators.
pub fn apply_number(psi: &WaveK) -> WaveK {
    apply_operator(LadderAction::Creation, &apply_operator(LadderAction::Annihilation, psi))
}

/// `<N> = ||a psi||^2 / ||psi||^2`; the energy is `<N> + 1/2`.
pub fn number_expectation(psi: &WaveK) -> Result<f64> {
    let n2 = psi.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(apply_operator(LadderAction::Annihilation, psi).norm_sqr() / n2)
}

/// Matrix representation of the number operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Finite-difference matrix on the quasi-momentum grid (periodic).
    KSpace(StencilOrder),
    /// Pentadiagonal lattice-site matrix with hard walls at `+-n_max`.
    Site,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::KSpace(_) => f.write_str("kspace"),
            Representation::Site => f.write_str("site"),
        }
    }
}

impl FromStr for Representation {
    type Err = Error;

    /// Accepts `site`, `kspace` (order 4), `kspace2` and `kspace4`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "site" => Ok(Representation::Site),
            "kspace" | "kspace4" => Ok(Representation::KSpace(StencilOrder::Fourth)),
            "kspace2" => Ok(Representation::KSpace(StencilOrder::Second)),
            other => Err(Error::InvalidParameter(format!(
                "unknown representation {other:?} (expected site, kspace, kspace2 or kspace4)"
            ))),
        }
    }
}

/// Number operator as a real symmetric band matrix.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    representation: Representation,
    params: OscParams,
    matrix: BandedSym,
}

impl OperatorMatrix {
    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn params(&self) -> &OscParams {
        &self.params
    }

    pub fn matrix(&self) -> &BandedSym {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `M` for k-space, `n_max` for sites.
    pub fn resolution(&self) -> usize {
        match self.representation {
            Representation::KSpace(_) => self.params.k_points(),
            Representation::Site => self.params.n_max(),
        }
    }
}

pub fn number_matrix(rep: Representation, params: &OscParams) -> Result<OperatorMatrix> {
    let matrix = match rep {
        Representation::KSpace(order) => kspace_matrix(order, params)?,
        Representation::Site => site_matrix(params)?,
    };
    debug_assert!(matrix.is_finite());
    Ok(OperatorMatrix {
        representation: rep,
        params: *params,
        matrix,
    })
}

fn kspace_matrix(order: StencilOrder, params: &OscParams) -> Result<BandedSym> {
    let grid = params.grid();
    let m = grid.len();
    let w = order.half_width();
    let mut a = BandedSym::zeros(m, w, true)?;
    let (weights, denom) = order.second_weights();
    let h2 = grid.weight() * grid.weight();
    let d = params.d();
    for j in 0..m {
        let kd = grid.phase(j);
        let s = kd.sin() / d;
        let diag = 0.5 * (-weights[w] / (denom * h2) + s * s - kd.cos());
        a.set(j, j, diag);
        for o in 1..=w {
            a.set(j, (j + o) % m, -0.5 * weights[w + o] / (denom * h2));
        }
    }
    Ok(a)
}

fn site_matrix(params: &OscParams) -> Result<BandedSym> {
    let n_max = params.n_max() as i64;
    let dim = 2 * params.n_max() + 1;
    let d = params.d();
    let g = params.gamma_d();
    let mut a = BandedSym::zeros(dim, 2, false)?;
    for (i, n) in (-n_max..=n_max).enumerate() {
        let x = n as f64 * d;
        a.set(i, i, 0.5 * x * x + 0.25 * g);
        if i + 1 < dim {
            a.set(i, i + 1, -0.25);
        }
        if i + 2 < dim {
            a.set(i, i + 2, -0.125 * g);
        }
    }
    Ok(a)
}

/// Lowest eigenvalues (and optionally eigenvectors) of a number-operator matrix.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// Real eigenvectors in the matrix basis (k-grid samples or sites `-n_max..=n_max`).
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub representation: Representation,
    pub gamma_d: f64,
    /// `M` for k-space, `n_max` for sites.
    pub resolution: usize,
}

impl SpectrumResult {
    /// Eigenvector `s` as a normalized k-space state. Only for the k-space representation.
    pub fn kspace_state(&self, s: usize, grid: &KGrid) -> Result<WaveK> {
        let vecs = self
            .eigenvectors
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("spectrum computed without eigenvectors".into()))?;
        if !matches!(self.representation, Representation::KSpace(_)) {
            return Err(Error::InvalidParameter(
                "eigenvector is not in the k-space basis".into(),
            ));
        }
        let v = vecs
            .get(s)
            .ok_or_else(|| Error::InvalidParameter(format!("no eigenvector {s}")))?;
        let psi = WaveK::new(*grid, v.iter().map(|x| Complex64::new(*x, 0.0)).collect())?;
        psi.normalized()
    }
}

/// Eigen-decomposition to tolerance `tol` relative to the matrix norm.
pub fn spectrum(matrix: &OperatorMatrix, n_eigs: usize, with_vectors: bool, tol: f64) -> Result<SpectrumResult> {
    let (eigenvalues, eigenvectors) = if with_vectors {
        let (w, v) = eigh(&matrix.matrix, n_eigs, tol)?;
        (w, Some(v))
    } else {
        (eigvalsh(&matrix.matrix, n_eigs)?, None)
    };
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        representation: matrix.representation,
        gamma_d: matrix.params.gamma_d(),
        resolution: matrix.resolution(),
    })
}

/// `gamma_d (cos(k_j d) - 1)`, the logarithm of the unnormalized ground state.
pub fn log_ground_state(grid: &KGrid) -> Vec<f64> {
    let g = 1.0 / (grid.d() * grid.d());
    (0..grid.len()).map(|j| g * (grid.phase(j).cos() - 1.0)).collect()
}

/// Normalized `psi_0(k) ~ exp(gamma_d (cos(kd) - 1))`.
///
/// `gamma_d` is taken from the grid spacing. The factor `exp(-gamma_d)` keeps
/// the peak at 1 before normalization; far from `k = 0` the state can
/// underflow to zero when `gamma_d` is in the hundreds.
pub fn ground_state_analytic(grid: &KGrid) -> WaveK {
    let values = log_ground_state(grid)
        .into_iter()
        .map(|l| Complex64::new(l.exp(), 0.0))
        .collect();
    WaveK::new(*grid, values)
        .and_then(|w| w.normalized())
        .expect("peak sample is 1, so the norm is positive")
}

/// Standard deviations of `X`, `P` and the mean of `cos(kd)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    pub delta_x: f64,
    pub delta_p: f64,
    pub mean_cos: f64,
}

impl Uncertainty {
    /// `dX dP - |<cos(kd)>| / 2`, nonnegative up to round-off.
    pub fn gup_slack(&self) -> f64 {
        self.delta_x * self.delta_p - 0.5 * self.mean_cos.abs()
    }
}

fn spread(psi: &WaveK, op_psi: &WaveK, norm_sqr: f64) -> f64 {
    let mean = inner_product(psi, op_psi).expect("same grid").re / norm_sqr;
    let centered = op_psi.zip_with(psi, |o, v| o - mean * v).expect("same grid");
    (centered.norm_sqr() / norm_sqr).sqrt()
}

pub fn uncertainty_report(psi: &WaveK) -> Result<Uncertainty> {
    let n2 = psi.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let delta_x = spread(psi, &position(psi), n2);
    let delta_p = spread(psi, &momentum(psi), n2);
    let grid = psi.grid();
    let mean_cos = grid.weight()
        * quad::sum(
            psi.values()
                .iter()
                .enumerate()
                .map(|(j, z)| z.norm_sqr() * grid.phase(j).cos()),
        )
        / n2;
    Ok(Uncertainty {
        delta_x,
        delta_p,
        mean_cos,
    })
}

/// Relative residual of the lattice Hermite equation
/// `phi'' - 2 sin(kd)/d phi' + 2 N phi = 0` for `phi = psi / psi_0`.
///
/// The residual is weighted by `psi_0`, and the stencil uses the ratios
/// `psi_0(k_j) / psi_0(k_{j+o})` formed from log values, so states living
/// where `psi_0` underflows are handled. Returns
/// `||psi_0 R|| / (2 max(|N|, 1) ||psi||)`.
pub fn hermite_residual(psi: &WaveK, n_tilde: f64, order: StencilOrder) -> Result<f64> {
    let grid = psi.grid();
    let m = grid.len();
    let w = order.half_width();
    if m < 2 * w + 1 {
        return Err(Error::InvalidParameter("grid too small for the stencil".into()));
    }
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let log0 = log_ground_state(grid);
    let d = grid.d();
    let h = grid.weight();
    let (w2, den2) = order.second_weights();
    let (w1, den1) = order.first_weights();
    let v = psi.values();
    let r: Vec<Complex64> = (0..m)
        .map(|j| {
            let drift = 2.0 * grid.phase(j).sin() / d;
            let mut acc = 2.0 * n_tilde * v[j];
            for o in 0..=2 * w {
                let idx = (j + m + o - w) % m;
                let ratio = (log0[j] - log0[idx]).exp();
                let c = w2[o] / (den2 * h * h) - drift * w1[o] / (den1 * h);
                acc += c * ratio * v[idx];
            }
            acc
        })
        .collect();
    let weighted = WaveK::new(*grid, r)?;
    Ok(weighted.norm() / (2.0 * n_tilde.abs().max(1.0) * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{from_sites, WaveX};
    use crate::numerics::jacobi::jacobi_eigh;
    use crate::numerics::RngState;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn grid(gamma: f64, m: usize) -> KGrid {
        OscParams::from_gamma(gamma, m, None).unwrap().grid()
    }

    /// Random state supported on sites `|n| <= 20`.
    fn random_local(grid: &KGrid, seed: u64) -> WaveK {
        let mut rng = RngState::new(seed);
        let vals = (0..41).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
        from_sites(&WaveX::new(grid.d(), 20, vals).unwrap(), grid).unwrap()
    }

    #[test]
    fn position_on_site_eigenstate() {
        let g = grid(3.0, 128);
        let d = g.d();
        for n0 in [-5i64, 0, 9] {
            let psi = WaveK::from_fn(g, |k| Complex64::from_polar(1.0, -k * n0 as f64 * d));
            let x = apply_operator(LadderAction::Position, &psi);
            let err = x.sub(&psi.scaled(c(n0 as f64 * d))).unwrap().max_abs();
            assert!(err < 1e-12, "n0 = {n0}: {err}");
        }
    }

    #[test]
    fn momentum_on_constant() {
        let g = grid(2.0, 64);
        let p = apply_operator(LadderAction::Momentum, &WaveK::from_fn(g, |_| c(1.0)));
        for (j, z) in p.values().iter().enumerate() {
            assert!((z.re - (g.point(j) * g.d()).sin() / g.d()).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn annihilation_kills_ground_state() {
        for gamma in [5.0, 50.0, 500.0] {
            let psi = ground_state_analytic(&grid(gamma, 2048));
            let r = apply_operator(LadderAction::Annihilation, &psi).norm() / psi.norm();
            assert!(r < 1e-10, "gamma {gamma}: {r}");
        }
    }

    #[test]
    fn xp_commutator_is_i_cos() {
        let psi = ground_state_analytic(&grid(500.0, 2048));
        let comm = commutator_xp(&psi);
        let expect = psi.map(|k, z| I * (k * psi.grid().d()).cos() * z);
        let err = comm.sub(&expect).unwrap().max_abs();
        assert!(err < 1e-8, "{err}");
        let zero = commutator_xp(&WaveK::zeros(*psi.grid()));
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn xp_commutator_near_continuum() {
        // cos(kd) -> 1 over the support as d shrinks.
        let psi = ground_state_analytic(&grid(5e4, 4096));
        let comm = commutator_xp(&psi);
        let d = psi.grid().d();
        // cos(kd) >= 1 - (kd)^2/2; weight the deviation by |psi|.
        for (j, (cz, z)) in comm.values().iter().zip(psi.values()).enumerate() {
            let kd = psi.grid().phase(j);
            let bound = 0.5 * kd * kd * z.norm() + 1e-9;
            assert!(
                (cz - I * z).norm() <= bound,
                "j = {j}: {} vs {bound}",
                (cz - I * z).norm()
            );
        }
        assert!(d < 5e-3);
    }

    #[test]
    fn ladder_commutator_is_cos() {
        let g = grid(20.0, 512);
        let psi = random_local(&g, 3);
        let comm = commutator_ladder(&psi);
        let expect = psi.map(|k, z| (k * g.d()).cos() * z);
        let err = comm.sub(&expect).unwrap().max_abs() / psi.max_abs();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn operators_are_hermitian() {
        let g = grid(20.0, 512);
        let a = random_local(&g, 11);
        let b = random_local(&g, 12);
        let scale = a.norm() * b.norm();
        for op in [
            LadderAction::Position,
            LadderAction::Momentum,
            LadderAction::QuadX,
            LadderAction::QuadP,
        ] {
            let lhs = inner_product(&a, &apply_operator(op, &b)).unwrap();
            let rhs = inner_product(&apply_operator(op, &a), &b).unwrap();
            assert!((lhs - rhs).norm() / scale < 1e-10, "{op:?}");
        }
        let lhs = inner_product(&a, &apply_operator(LadderAction::Annihilation, &b)).unwrap();
        let rhs = inner_product(&apply_operator(LadderAction::Creation, &a), &b).unwrap();
        assert!((lhs - rhs).norm() / scale < 1e-10);
    }

    #[test]
    fn site_row_entries() {
        let p = OscParams::from_gamma(500.0, 64, Some(10)).unwrap();
        let m = number_matrix(Representation::Site, &p).unwrap();
        let a = m.matrix();
        let i = 10 + 3;
        let x = 3.0 * p.d();
        assert_eq!(a.get(i, i - 2), -500.0 / 8.0);
        assert_eq!(a.get(i, i - 1), -0.25);
        assert!((a.get(i, i) - (0.5 * x * x + 125.0)).abs() < 1e-12);
        assert_eq!(a.get(i, i + 1), -0.25);
        assert_eq!(a.get(i, i + 2), -62.5);
        assert_eq!(a.get(0, 20), 0.0);
    }

    #[test]
    fn kspace_diagonal_at_zero_order_two() {
        let p = OscParams::from_gamma(500.0, 256, None).unwrap();
        let m = number_matrix(Representation::KSpace(StencilOrder::Second), &p).unwrap();
        let g = p.grid();
        let j = g.zero_index();
        let h = g.weight();
        assert!((m.matrix().get(j, j) - 0.5 * (2.0 / (h * h) - 1.0)).abs() < 1e-9);
        // Periodic corner.
        assert_eq!(m.matrix().get(0, 255), m.matrix().get(0, 1));
    }

    #[test]
    fn matrices_are_symmetric() {
        let p = OscParams::from_gamma(50.0, 32, Some(12)).unwrap();
        for rep in [
            Representation::Site,
            Representation::KSpace(StencilOrder::Second),
            Representation::KSpace(StencilOrder::Fourth),
        ] {
            let m = number_matrix(rep, &p).unwrap();
            let n = m.dim();
            let a = m.matrix().to_dense();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(a[i * n + j], a[j * n + i]);
                }
            }
        }
    }

    #[test]
    fn representation_tags() {
        assert_eq!("site".parse::<Representation>().unwrap(), Representation::Site);
        assert_eq!(
            "kspace2".parse::<Representation>().unwrap(),
            Representation::KSpace(StencilOrder::Second)
        );
        assert!("momentum".parse::<Representation>().is_err());
    }

    #[test]
    fn small_site_spectrum_matches_jacobi() {
        let p = OscParams::from_gamma(30.0, 64, Some(40)).unwrap();
        let m = number_matrix(Representation::Site, &p).unwrap();
        let res = spectrum(&m, 10, true, 1e-12).unwrap();
        let (w, _) = jacobi_eigh(&m.matrix().to_dense(), m.dim()).unwrap();
        for (a, b) in res.eigenvalues.iter().zip(&w) {
            assert!((a - b).abs() < 1e-10 * m.matrix().norm_inf(), "{a} vs {b}");
        }
    }

    #[test]
    fn ground_state_zero_and_uniform_limits() {
        let g = KGrid::new(1e6, 16).unwrap();
        let psi = ground_state_analytic(&g);
        let v0 = psi.values()[0];
        assert!(psi.values().iter().all(|z| (z - v0).norm() < 1e-9));
        let u = uncertainty_report(&WaveK::from_fn(grid(4.0, 64), |_| c(1.0))).unwrap();
        assert!(u.mean_cos.abs() < 1e-14 && u.gup_slack() >= -1e-14);
    }

    #[test]
    fn ground_state_has_zero_number() {
        let psi = ground_state_analytic(&grid(500.0, 2048));
        assert!(number_expectation(&psi).unwrap() < 1e-8);
        assert!((psi.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ground_state_is_minimal() {
        let psi = ground_state_analytic(&grid(500.0, 2048));
        let u = uncertainty_report(&psi).unwrap();
        assert!(u.gup_slack().abs() < 1e-8, "{}", u.gup_slack());
        assert!((u.delta_x - u.delta_p).abs() < 1e-8);
    }

    #[test]
    fn uncertainty_rejects_zero() {
        assert!(matches!(
            uncertainty_report(&WaveK::zeros(grid(1.0, 16))),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn hermite_residual_of_ground_state_is_zero() {
        let psi = ground_state_analytic(&grid(500.0, 2048));
        let r = hermite_residual(&psi, 0.0, StencilOrder::Fourth).unwrap();
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn hermite_residual_of_random_state_is_large() {
        let g = grid(500.0, 2048);
        let mut rng = RngState::new(2024);
        let psi = WaveK::new(g, (0..g.len()).map(|_| c(rng.normal())).collect()).unwrap();
        assert!(hermite_residual(&psi, 2.0, StencilOrder::Fourth).unwrap() > 0.1);
    }

    #[test]
    fn harmonic_limit_spectrum() {
        // Small d: the low site spectrum approaches 0, 1, 2, ... for the
        // k = 0 well and 1, 2, ... for the zone-edge well.
        let p = OscParams::from_gamma(2000.0, 64, None).unwrap();
        let m = number_matrix(Representation::Site, &p).unwrap();
        let w = spectrum(&m, 5, false, 1e-12).unwrap().eigenvalues;
        assert!(w[0].abs() < 1e-8);
        for (s, expect) in [(1, 1.0), (2, 1.0), (3, 2.0), (4, 2.0)] {
            assert!((w[s] - expect).abs() < 5e-3, "s={s}: {}", w[s]);
        }
    }
}
