//! Coherent states, the displacement operator and the planar angular
//! momentum built from two lattice oscillators.
//!
//! With `a = (X + iP)/sqrt(2)` the relation `a Psi = alpha cos(kd) Psi` is
//! solved by `Psi_alpha = exp(-i sqrt(2) alpha sin(kd)/d) psi_0`, and
//! `a psi = alpha psi` by `exp(-i sqrt(2) alpha k) psi_0`, which is periodic
//! in `k` only for `alpha = j d / sqrt(2)`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Axis, KGrid, Wave2D, WaveK};
use crate::oscillator::{apply_number, apply_operator, ground_state_analytic, LadderAction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which coherent-state construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherentKind {
    /// Eigenstate of `a`; needs a lattice-compatible real `alpha`.
    Eigenstate,
    /// Solution of `a Psi = alpha cos(kd) Psi`.
    Defined,
    /// `D(alpha) psi_0`.
    Displacement,
}

impl std::str::FromStr for CoherentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigenstate" => Ok(CoherentKind::Eigenstate),
            "defined" => Ok(CoherentKind::Defined),
            "displacement" => Ok(CoherentKind::Displacement),
            other => Err(Error::InvalidParameter(format!(
                "unknown coherent kind {other:?} (expected eigenstate, defined or displacement)"
            ))),
        }
    }
}

impl std::fmt::Display for CoherentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoherentKind::Eigenstate => "eigenstate",
            CoherentKind::Defined => "defined",
            CoherentKind::Displacement => "displacement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentSpec {
    pub alpha: Complex64,
    pub kind: CoherentKind,
}

impl CoherentSpec {
    pub fn new(alpha: Complex64, kind: CoherentKind) -> Self {
        Self { alpha, kind }
    }
}

/// A coherent state with its norm. Complex `alpha` gives an unnormalized
/// state; it is returned as is.
#[derive(Debug, Clone)]
pub struct CoherentState {
    pub state: WaveK,
    pub norm: f64,
}

/// Integer `j` with `alpha = j d / sqrt(2)`, if there is one.
pub fn lattice_index(alpha: Complex64, d: f64) -> Result<i64> {
    let reject = |reason: String| Error::NonLatticeAlpha {
        alpha: format!("{alpha}"),
        reason,
    };
    if alpha.im != 0.0 {
        return Err(reject("alpha must be real".into()));
    }
    let j = alpha.re * SQRT_2 / d;
    let jr = j.round();
    if (j - jr).abs() > 1e-9 * jr.abs().max(1.0) {
        return Err(reject(format!(
            "exp(-i sqrt(2) alpha k) is periodic in k only for alpha = j d / sqrt(2) = j * {:.6}",
            d / SQRT_2
        )));
    }
    Ok(jr as i64)
}

pub fn coherent_state(spec: CoherentSpec, grid: &KGrid) -> Result<CoherentState> {
    let psi0 = ground_state_analytic(grid);
    let state = match spec.kind {
        CoherentKind::Eigenstate => {
            let j = lattice_index(spec.alpha, grid.d())?;
            // exp(-i j k d) evaluated on the phase grid keeps periodicity exact.
            let values = psi0
                .values()
                .iter()
                .enumerate()
                .map(|(idx, z)| z * Complex64::from_polar(1.0, -(j as f64) * grid.phase(idx)))
                .collect();
            WaveK::new(*grid, values)?
        }
        CoherentKind::Defined | CoherentKind::Displacement => displacement_apply(spec.alpha, &psi0),
    };
    let norm = state.norm();
    Ok(CoherentState { state, norm })
}

/// `D(alpha) psi = exp(-i sqrt(2) alpha P) psi`, pointwise in `k`.
pub fn displacement_apply(alpha: Complex64, psi: &WaveK) -> WaveK {
    let d = psi.grid().d();
    let g = *psi.grid();
    let values = psi
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| z * (-I * SQRT_2 * alpha * (g.phase(j).sin() / d)).exp())
        .collect();
    WaveK::new(g, values).expect("grid length preserved")
}

/// `||(a - alpha cos(kd)) Psi|| / ||Psi||`.
pub fn defined_residual(alpha: Complex64, psi: &WaveK) -> Result<f64> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let a = apply_operator(LadderAction::Annihilation, psi);
    let g = *psi.grid();
    let values = a
        .values()
        .iter()
        .zip(psi.values())
        .enumerate()
        .map(|(j, (av, v))| av - alpha * g.phase(j).cos() * v)
        .collect();
    Ok(WaveK::new(g, values)?.norm() / norm)
}

/// `||(a - alpha) psi|| / ||psi||`.
pub fn eigen_residual(alpha: Complex64, psi: &WaveK) -> Result<f64> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let a = apply_operator(LadderAction::Annihilation, psi);
    Ok(a.zip_with(psi, |av, v| av - alpha * v)?.norm() / norm)
}

fn axis_op(psi: &Wave2D, axis: Axis, op: LadderAction) -> Wave2D {
    psi.map_axis(axis, |w| apply_operator(op, w))
}

/// `L psi = i (a1 a2^dagger - a1^dagger a2) psi`. Axis 1 runs over rows.
pub fn angular_apply(psi: &Wave2D) -> Wave2D {
    use LadderAction::{Annihilation, Creation};
    let a1c2 = axis_op(&axis_op(psi, Axis::Second, Creation), Axis::First, Annihilation);
    let c1a2 = axis_op(&axis_op(psi, Axis::Second, Annihilation), Axis::First, Creation);
    a1c2.zip_with(&c1a2, |x, y| I * (x - y)).expect("same grid")
}

/// `L psi = (x1 p2 - x2 p1) psi`, the coordinate form of [`angular_apply`].
pub fn angular_apply_xp(psi: &Wave2D) -> Wave2D {
    use LadderAction::{Momentum, Position};
    let x1p2 = axis_op(&axis_op(psi, Axis::Second, Momentum), Axis::First, Position);
    let x2p1 = axis_op(&axis_op(psi, Axis::First, Momentum), Axis::Second, Position);
    x1p2.zip_with(&x2p1, |x, y| x - y).expect("same grid")
}

/// `(N1 + N2) psi`.
pub fn total_number_apply(psi: &Wave2D) -> Wave2D {
    let n1 = psi.map_axis(Axis::First, apply_number);
    let n2 = psi.map_axis(Axis::Second, apply_number);
    n1.zip_with(&n2, |a, b| a + b).expect("same grid")
}

/// `||[L, N1 + N2] psi|| / ||psi||`.
pub fn commutator_residual(psi: &Wave2D) -> Result<f64> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let ln = angular_apply(&total_number_apply(psi));
    let nl = total_number_apply(&angular_apply(psi));
    Ok(ln.zip_with(&nl, |a, b| a - b)?.norm() / norm)
}

/// Smooth test family `exp(gamma_d (cos k1 d + cos k2 d - 2)) exp(i k1 d)`,
/// normalized. It is a ground state displaced by one site along axis 1.
pub fn smooth_family(grid: &KGrid) -> Wave2D {
    let g = 1.0 / (grid.d() * grid.d());
    let d = grid.d();
    let psi = Wave2D::from_fn(*grid, |k1, k2| {
        let amp = (g * ((k1 * d).cos() + (k2 * d).cos() - 2.0)).exp();
        Complex64::from_polar(amp, k1 * d)
    });
    let n = psi.norm();
    let values = psi.values().iter().map(|z| z / n).collect();
    Wave2D::new(*grid, values).expect("same grid")
}

/// Commutator residual `r(d)` of [`smooth_family`] on an `m x m` grid for each `d`.
pub fn angular_nonconservation(d_values: &[f64], m: usize) -> Result<Vec<f64>> {
    d_values
        .iter()
        .map(|&d| {
            let grid = KGrid::new(d, m)?;
            commutator_residual(&smooth_family(&grid))
        })
        .collect()
}

/// `psi_0 (x) psi_0` on `grid`.
pub fn ground_state_2d(grid: &KGrid) -> Wave2D {
    let psi0 = ground_state_analytic(grid);
    Wave2D::product(&psi0, &psi0).expect("same grid")
}
