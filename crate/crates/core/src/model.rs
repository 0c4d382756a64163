//! Grids, wavefunction containers and the exact change of basis between
//! quasi-momentum and lattice sites.
//!
//! Units are oscillator units throughout (hbar = m = omega = 1): lengths in
//! `sqrt(hbar / m omega)`, energies in `hbar omega`. The only model
//! parameter is the lattice spacing `d`, or equivalently
//! `gamma_d = 1 / d^2`.
//!
//! Conventions:
//! * quasi-momenta `k_j = -pi/d + (j + 1) dk`, `dk = 2 pi / (M d)`, so the
//!   grid covers `(-pi/d, pi/d]` and includes `k = 0` at `j = M/2 - 1`;
//! * sites `psi(n) = sqrt(d / 2 pi) dk sum_j exp(i k_j n d) psi(k_j)`;
//! * back to the grid `psi(k_j) = sqrt(d / 2 pi) sum_n exp(-i k_j n d) psi(n)`.
//!
//! With these factors the transform is an isometry between
//! `<a, b>_K = dk sum_j conj(a_j) b_j` and the plain site sum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::dft::{dft_in_place, Sign};
use crate::numerics::quad;

/// Cap on the default site-grid half-width.
pub const MAX_DEFAULT_N_MAX: usize = 4000;
/// Default number of quasi-momentum points.
pub const DEFAULT_K_POINTS: usize = 2048;

/// Lattice spacing and grid sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscParams {
    d: f64,
    gamma_d: f64,
    k_points: usize,
    n_max: usize,
}

impl OscParams {
    /// `n_max = None` selects [`OscParams::default_n_max`].
    pub fn from_spacing(d: f64, k_points: usize, n_max: Option<usize>) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lattice spacing must be positive, got {d}"
            )));
        }
        if k_points < 8 || !k_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "k_points must be even and >= 8, got {k_points}"
            )));
        }
        let n_max = n_max.unwrap_or_else(|| Self::default_n_max(d));
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        Ok(Self {
            d,
            gamma_d: 1.0 / (d * d),
            k_points,
            n_max,
        })
    }

    pub fn from_gamma(gamma_d: f64, k_points: usize, n_max: Option<usize>) -> Result<Self> {
        if !(gamma_d > 0.0 && gamma_d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_d must be positive, got {gamma_d}"
            )));
        }
        let mut p = Self::from_spacing(1.0 / gamma_d.sqrt(), k_points, n_max)?;
        p.gamma_d = gamma_d;
        Ok(p)
    }

    /// `ceil(10 sqrt(2 * 20 + 1) / d)` capped at [`MAX_DEFAULT_N_MAX`]:
    /// ten classical turning points of the 20th level.
    pub fn default_n_max(d: f64) -> usize {
        let n = (10.0 * 41f64.sqrt() / d).ceil();
        (n as usize).clamp(1, MAX_DEFAULT_N_MAX)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn k_points(&self) -> usize {
        self.k_points
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn grid(&self) -> KGrid {
        KGrid {
            d: self.d,
            m: self.k_points,
        }
    }
}

/// Uniform quasi-momentum grid on `(-pi/d, pi/d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGrid {
    d: f64,
    m: usize,
}

impl KGrid {
    pub fn new(d: f64, m: usize) -> Result<Self> {
        Ok(OscParams::from_spacing(d, m, Some(1))?.grid())
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// `dk`, the uniform quadrature weight.
    pub fn weight(&self) -> f64 {
        2.0 * PI / (self.m as f64 * self.d)
    }

    pub fn zone_length(&self) -> f64 {
        2.0 * PI / self.d
    }

    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        -PI / self.d + (j + 1) as f64 * self.weight()
    }

    /// `k_j d`, computed without the round trip through `k_j`.
    #[inline]
    pub fn phase(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * (j + 1) as f64 / self.m as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(|j| self.point(j))
    }

    /// Index of `k = 0`.
    pub fn zero_index(&self) -> usize {
        self.m / 2 - 1
    }

    fn check_same(&self, other: &KGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "(d = {}, M = {}) vs (d = {}, M = {})",
                self.d, self.m, other.d, other.m
            )));
        }
        Ok(())
    }

    /// Site label represented by DFT bin `m`: `0..M/2` stay, the upper half
    /// maps to negative sites, `M/2` is the shared Nyquist bin.
    fn bin_site(&self, bin: usize) -> SiteBin {
        let half = self.m / 2;
        if bin < half {
            SiteBin::Site(bin as i64)
        } else if bin == half {
            SiteBin::Nyquist(half as i64)
        } else {
            SiteBin::Site(bin as i64 - self.m as i64)
        }
    }
}

enum SiteBin {
    Site(i64),
    Nyquist(i64),
}

/// Samples `psi(k_j)` on a [`KGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveK {
    grid: KGrid,
    values: Vec<Complex64>,
}

impl WaveK {
    pub fn new(grid: KGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("wavefunction has non-finite samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: KGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: KGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.point(j))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &KGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.weight() * quad::sum(self.values.iter().map(|z| z.norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.map(|_, z| z * factor)
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Pointwise map `f(k_j, psi_j)`.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, z)| f(self.grid.point(j), *z))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Pointwise combination of two states on the same grid.
    pub fn zip_with(&self, other: &WaveK, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn sub(&self, other: &WaveK) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &WaveK) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Largest `|psi_j|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Unnormalized DFT bins `s_m = sum_j psi_j exp(2 pi i j m / M)`.
    fn bins(&self) -> Vec<Complex64> {
        let mut s = self.values.clone();
        dft_in_place(&mut s, Sign::Positive);
        s
    }

    /// Multiplies every site amplitude by `f(n)`, using one representative
    /// site per DFT bin (the Nyquist bin gets the mean of `f(+-M/2)`), and
    /// returns to the grid. Real `f` gives a Hermitian operator.
    pub fn apply_site_multiplier(&self, f: impl Fn(i64) -> f64) -> Self {
        let mut s = self.bins();
        let inv_m = 1.0 / self.grid.len() as f64;
        for (bin, z) in s.iter_mut().enumerate() {
            let factor = match self.grid.bin_site(bin) {
                SiteBin::Site(n) => f(n),
                SiteBin::Nyquist(h) => 0.5 * (f(h) + f(-h)),
            };
            *z *= factor * inv_m;
        }
        dft_in_place(&mut s, Sign::Negative);
        Self {
            grid: self.grid,
            values: s,
        }
    }
}

/// `<a, b> = dk sum_j conj(a_j) b_j`.
pub fn inner_product(a: &WaveK, b: &WaveK) -> Result<Complex64> {
    a.grid.check_same(&b.grid)?;
    let s = quad::sum_complex(a.values.iter().zip(&b.values).map(|(x, y)| x.conj() * y));
    Ok(s * a.grid.weight())
}

/// Site amplitudes `psi(n)`, `n = -n_max..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveX {
    d: f64,
    n_max: usize,
    values: Vec<Complex64>,
}

impl WaveX {
    pub fn new(d: f64, n_max: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 2 * n_max + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} site values for n_max = {n_max}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("site amplitudes must be finite".into()));
        }
        Ok(Self { d, n_max, values })
    }

    /// Unit amplitude at site `n0`, zero elsewhere.
    pub fn delta(d: f64, n_max: usize, n0: i64) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        let idx = n0 + n_max as i64;
        if idx < 0 || idx as usize >= values.len() {
            return Err(Error::InvalidParameter(format!("site {n0} outside +-{n_max}")));
        }
        values[idx as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { d, n_max, values })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Amplitude at site `n` (zero outside the stored range).
    pub fn site(&self, n: i64) -> Complex64 {
        let idx = n + self.n_max as i64;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n_max = self.n_max as i64;
        self.values.iter().enumerate().map(move |(i, z)| (i as i64 - n_max, *z))
    }

    pub fn norm_sqr(&self) -> f64 {
        quad::sum(self.values.iter().map(|z| z.norm_sqr()))
    }
}

/// Phase `exp(i k_0 n d) = (-1)^n exp(2 pi i n / M)` linking site `n` to its DFT bin.
fn site_phase(n: i64, m: usize) -> Complex64 {
    let turns = (n.rem_euclid(m as i64)) as f64 / m as f64;
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::from_polar(sign, 2.0 * PI * turns)
}

/// Transform to lattice sites `-n_max..=n_max`.
///
/// When `2 n_max + 1 > M` the sites alias (bins repeat with period `M`) and
/// the transform is no longer an isometry; a warning is logged.
pub fn to_sites(psi: &WaveK, n_max: usize) -> WaveX {
    let grid = psi.grid;
    let m = grid.len();
    if 2 * n_max + 1 > m {
        log::warn!("to_sites: {} sites exceed M = {m}; sites alias", 2 * n_max + 1);
    }
    let s = psi.bins();
    let scale = (grid.d / (2.0 * PI)).sqrt() * grid.weight();
    let values = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let bin = n.rem_euclid(m as i64) as usize;
            s[bin] * site_phase(n, m) * scale
        })
        .collect();
    WaveX {
        d: grid.d,
        n_max,
        values,
    }
}

/// Inverse of [`to_sites`] onto `grid`.
pub fn from_sites(psi: &WaveX, grid: &KGrid) -> Result<WaveK> {
    if psi.d != grid.d {
        return Err(Error::GridMismatch(format!(
            "site spacing {} vs grid spacing {}",
            psi.d, grid.d
        )));
    }
    let m = grid.len();
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    for (n, z) in psi.sites() {
        b[n.rem_euclid(m as i64) as usize] += z * site_phase(n, m).conj();
    }
    dft_in_place(&mut b, Sign::Negative);
    let scale = (grid.d / (2.0 * PI)).sqrt();
    b.iter_mut().for_each(|z| *z *= scale);
    Ok(WaveK { grid: *grid, values: b })
}

/// Samples `psi(k1, k2)` on the tensor product of two identical grids,
/// row-major with the row index running over `k1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave2D {
    grid: KGrid,
    values: Vec<Complex64>,
}

/// Axis of a [`Wave2D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// First coordinate (rows).
    First,
    /// Second coordinate (columns).
    Second,
}

impl Wave2D {
    pub fn new(grid: KGrid, values: Vec<Complex64>) -> Result<Self> {
        let m = grid.len();
        if values.len() != m * m {
            return Err(Error::GridMismatch(format!(
                "{} samples for a square grid of side {m}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("wavefunction has non-finite samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: KGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let m = grid.len();
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            let k1 = grid.point(i);
            for j in 0..m {
                values.push(f(k1, grid.point(j)));
            }
        }
        Self { grid, values }
    }

    /// `a(k1) b(k2)`.
    pub fn product(a: &WaveK, b: &WaveK) -> Result<Self> {
        a.grid.check_same(&b.grid)?;
        let mut values = Vec::with_capacity(a.values.len() * b.values.len());
        for x in &a.values {
            for y in &b.values {
                values.push(x * y);
            }
        }
        Ok(Self { grid: a.grid, values })
    }

    pub fn grid(&self) -> &KGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.len() + j]
    }

    pub fn norm_sqr(&self) -> f64 {
        let w = self.grid.weight();
        w * w * quad::sum(self.values.iter().map(|z| z.norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Wave2D) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let w = self.grid.weight();
        let s = quad::sum_complex(self.values.iter().zip(&other.values).map(|(x, y)| x.conj() * y));
        Ok(s * w * w)
    }

    /// `psi(k2, k1)`.
    pub fn swapped(&self) -> Self {
        let m = self.grid.len();
        let mut values = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                values[j * m + i] = self.values[i * m + j];
            }
        }
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn zip_with(&self, other: &Wave2D, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// Applies a one-dimensional operator along `axis`.
    pub fn map_axis(&self, axis: Axis, op: impl Fn(&WaveK) -> WaveK) -> Self {
        let m = self.grid.len();
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        match axis {
            Axis::Second => {
                for i in 0..m {
                    let row = WaveK {
                        grid: self.grid,
                        values: self.values[i * m..(i + 1) * m].to_vec(),
                    };
                    out[i * m..(i + 1) * m].copy_from_slice(&op(&row).values);
                }
            }
            Axis::First => {
                for j in 0..m {
                    let col = WaveK {
                        grid: self.grid,
                        values: (0..m).map(|i| self.values[i * m + j]).collect(),
                    };
                    for (i, z) in op(&col).values.into_iter().enumerate() {
                        out[i * m + j] = z;
                    }
                }
            }
        }
        Self {
            grid: self.grid,
            values: out,
        }
    }
}
