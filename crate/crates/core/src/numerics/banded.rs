//! Symmetric banded matrices and their low-lying eigenpairs.
//!
//! Pipeline of [`eigh`]:
//! 1. a periodic (cyclic) band is folded into an ordinary band of twice the
//!    width by the interleaving permutation `0, n-1, 1, n-2, ...`;
//! 2. the band is reduced to tridiagonal form by Givens rotations with bulge
//!    chasing, one bandwidth at a time;
//! 3. implicit-shift QL yields all eigenvalues of the tridiagonal matrix;
//! 4. eigenvectors of the requested eigenvalues come from inverse iteration
//!    on the banded matrix itself, with Gram-Schmidt against earlier vectors
//!    so quasi-degenerate pairs stay orthogonal.

use crate::error::{Error, Result};

use super::jacobi::jacobi_eigh;

/// Below this dimension [`eigh`] diagonalizes densely with Jacobi.
const DENSE_CUTOFF: usize = 16;
const QL_MAX_ITER: usize = 60;
const INVERSE_ITER_MAX: usize = 12;

/// Real symmetric band matrix.
///
/// Row `i` stores `A[i][(i - o) mod n]` for `o = 0..=half_bandwidth`. When
/// `periodic` is set the band wraps around the corners.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    dim: usize,
    half_bandwidth: usize,
    periodic: bool,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(dim: usize, half_bandwidth: usize, periodic: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if periodic && dim <= 2 * half_bandwidth {
            return Err(Error::InvalidParameter(format!(
                "periodic band of half-width {half_bandwidth} needs dim > {}",
                2 * half_bandwidth
            )));
        }
        Ok(Self {
            dim,
            half_bandwidth,
            periodic,
            data: vec![0.0; dim * (half_bandwidth + 1)],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Storage slot of `(i, j)`, if it lies inside the band.
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (n, w) = (self.dim, self.half_bandwidth);
        if i >= n || j >= n {
            return None;
        }
        if self.periodic {
            let d = (i + n - j) % n;
            if d <= w {
                Some(i * (w + 1) + d)
            } else if n - d <= w {
                Some(j * (w + 1) + (n - d))
            } else {
                None
            }
        } else if i >= j && i - j <= w {
            Some(i * (w + 1) + (i - j))
        } else if j > i && j - i <= w {
            Some(j * (w + 1) + (j - i))
        } else {
            None
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Sets `A[i][j] = A[j][i] = value`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band of half-width {}", self.half_bandwidth));
        self.data[s] = value;
    }

    /// Diagonal and the stored sub-diagonals `A[i][i - o]` of row `i`.
    pub fn row_band(&self, i: usize) -> &[f64] {
        let w = self.half_bandwidth + 1;
        &self.data[i * w..(i + 1) * w]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Columns `j` with a stored entry in row `i`.
    fn row_columns(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (n, w) = (self.dim, self.half_bandwidth as isize);
        (-w..=w).filter_map(move |o| {
            let j = i as isize + o;
            if self.periodic {
                Some(j.rem_euclid(n as isize) as usize)
            } else if (0..n as isize).contains(&j) {
                Some(j as usize)
            } else {
                None
            }
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row_columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row_columns(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in self.row_columns(i) {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    /// Non-periodic band of width `2 * half_bandwidth` equal to `P A P^T`
    /// for the interleaving permutation; returns it together with the
    /// permutation (`perm[new] = old`).
    fn fold(&self) -> (BandedSym, Vec<usize>) {
        let n = self.dim;
        let perm: Vec<usize> = (0..n)
            .map(|a| if a % 2 == 0 { a / 2 } else { n - 1 - (a - 1) / 2 })
            .collect();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let w = 2 * self.half_bandwidth;
        let mut out = BandedSym {
            dim: n,
            half_bandwidth: w,
            periodic: false,
            data: vec![0.0; n * (w + 1)],
        };
        for i in 0..n {
            for j in self.row_columns(i) {
                let (a, b) = (inv[i], inv[j]);
                out.set(a, b, self.get(i, j));
            }
        }
        (out, perm)
    }
}

/// Flips `v` so that its first significant component is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-6 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Working storage for the band reduction: lower band plus one extra
/// diagonal to hold the bulge.
struct BulgeBand {
    n: usize,
    width: usize,
    data: Vec<f64>,
}

impl BulgeBand {
    fn from_band(a: &BandedSym) -> Self {
        let n = a.dim;
        let width = a.half_bandwidth + 1;
        let mut data = vec![0.0; n * (width + 1)];
        for i in 0..n {
            for (o, v) in a.row_band(i).iter().enumerate() {
                if o <= i {
                    data[i * (width + 1) + o] = *v;
                }
            }
        }
        Self { n, width, data }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let o = r - c;
        if o > self.width {
            0.0
        } else {
            self.data[r * (self.width + 1) + o]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let o = r - c;
        if o > self.width {
            debug_assert!(v == 0.0, "fill outside working band at ({r}, {c}): {v}");
            return;
        }
        self.data[r * (self.width + 1) + o] = v;
    }

    /// Similarity rotation in the plane `(p, p + 1)` that zeroes `A[p + 1][col]`.
    fn annihilate(&mut self, p: usize, col: usize, band: usize) {
        let q = p + 1;
        let x = self.get(p, col);
        let y = self.get(q, col);
        if y == 0.0 {
            return;
        }
        let r = x.hypot(y);
        let (c, s) = (x / r, y / r);
        let lo = p.saturating_sub(band + 1);
        let hi = (q + band + 1).min(self.n - 1);
        for k in lo..=hi {
            if k == p || k == q {
                continue;
            }
            let akp = self.get(k, p);
            let akq = self.get(k, q);
            if akp == 0.0 && akq == 0.0 {
                continue;
            }
            self.set(k, p, c * akp + s * akq);
            self.set(k, q, -s * akp + c * akq);
        }
        let app = self.get(p, p);
        let aqq = self.get(q, q);
        let apq = self.get(p, q);
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(p, q, c * s * (aqq - app) + (c * c - s * s) * apq);
        self.set(q, col, 0.0);
    }
}

/// Reduces a non-periodic band to tridiagonal form `(diagonal, off-diagonal)`.
fn band_to_tridiagonal(a: &BandedSym) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(!a.periodic);
    let n = a.dim;
    let mut w = BulgeBand::from_band(a);
    for band in (2..=a.half_bandwidth).rev() {
        for j in 0..n {
            if j + band >= n {
                break;
            }
            if w.get(j + band, j) == 0.0 {
                continue;
            }
            w.annihilate(j + band - 1, j, band);
            // The rotation leaves a bulge one diagonal outside the band;
            // chase it off the bottom.
            let mut col = j + band - 1;
            let mut row = col + band + 1;
            while row < n {
                if w.get(row, col) != 0.0 {
                    w.annihilate(row - 1, col, band);
                }
                col = row - 1;
                row = col + band + 1;
            }
        }
    }
    let diag = (0..n).map(|i| w.get(i, i)).collect();
    let off = (0..n.saturating_sub(1)).map(|i| w.get(i + 1, i)).collect();
    (diag, off)
}

/// All eigenvalues of a symmetric tridiagonal matrix by implicit QL, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NoConvergence {
                    iterations: QL_MAX_ITER,
                    index: l,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// LU factorization with partial pivoting of a shifted band matrix.
struct BandLu {
    n: usize,
    kl: usize,
    /// Row `i` holds columns `i - kl ..= i + 2 kl`.
    stride: usize,
    data: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn new(a: &BandedSym, shift: f64, tiny: f64) -> Self {
        debug_assert!(!a.periodic);
        let n = a.dim;
        let kl = a.half_bandwidth;
        let stride = 3 * kl + 1;
        let mut lu = BandLu {
            n,
            kl,
            stride,
            data: vec![0.0; n * stride],
            piv: vec![0; n],
        };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + kl).min(n - 1);
            for j in lo..=hi {
                let v = a.get(i, j) - if i == j { shift } else { 0.0 };
                *lu.at(i, j) = v;
            }
        }
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = lu.val(j, j).abs();
            for i in (j + 1)..=(j + km) {
                let v = lu.val(i, j).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.piv[j] = p;
            let ju = (j + 2 * kl).min(n - 1);
            if p != j {
                for c in j..=ju {
                    let tmp = lu.val(j, c);
                    *lu.at(j, c) = lu.val(p, c);
                    *lu.at(p, c) = tmp;
                }
            }
            if lu.val(j, j).abs() < tiny {
                *lu.at(j, j) = if lu.val(j, j) < 0.0 { -tiny } else { tiny };
            }
            let pivot = lu.val(j, j);
            for i in (j + 1)..=(j + km) {
                let l = lu.val(i, j) / pivot;
                *lu.at(i, j) = l;
                if l != 0.0 {
                    for c in (j + 1)..=ju {
                        let u = lu.val(j, c);
                        *lu.at(i, c) -= l * u;
                    }
                }
            }
        }
        lu
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.stride + (j + self.kl - i)
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    #[inline]
    fn val(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn solve(&self, b: &mut [f64]) {
        let (n, kl) = (self.n, self.kl);
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            for i in (j + 1)..=(j + km) {
                b[i] -= self.val(i, j) * b[j];
            }
        }
        for j in (0..n).rev() {
            let ju = (j + 2 * kl).min(n - 1);
            let mut acc = b[j];
            for c in (j + 1)..=ju {
                acc -= self.val(j, c) * b[c];
            }
            b[j] = acc / self.val(j, j);
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Lowest `n_eigs` eigenvalues, ascending.
pub fn eigvalsh(a: &BandedSym, n_eigs: usize) -> Result<Vec<f64>> {
    check_request(a, n_eigs)?;
    if a.dim <= DENSE_CUTOFF {
        let (w, _) = jacobi_eigh(&a.to_dense(), a.dim)?;
        return Ok(w[..n_eigs].to_vec());
    }
    let folded;
    let band = if a.periodic {
        folded = a.fold().0;
        &folded
    } else {
        a
    };
    let (d, e) = band_to_tridiagonal(band);
    let mut w = tridiagonal_eigenvalues(&d, &e)?;
    w.truncate(n_eigs);
    Ok(w)
}

/// Lowest `n_eigs` eigenpairs with residual `||A v - lambda v|| <= tol ||A||`.
///
/// Eigenvectors are unit length with the first significant component positive.
pub fn eigh(a: &BandedSym, n_eigs: usize, tol: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_request(a, n_eigs)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a.dim <= DENSE_CUTOFF {
        let (w, v) = jacobi_eigh(&a.to_dense(), a.dim)?;
        return Ok((w[..n_eigs].to_vec(), v[..n_eigs].to_vec()));
    }
    let (band, perm) = if a.periodic {
        let (b, p) = a.fold();
        (b, Some(p))
    } else {
        (a.clone(), None)
    };
    let (d, e) = band_to_tridiagonal(&band);
    let mut values = tridiagonal_eigenvalues(&d, &e)?;
    values.truncate(n_eigs);

    let n = band.dim;
    let norm = band.norm_inf().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * norm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_eigs);
    for (idx, &lambda) in values.iter().enumerate() {
        let lu = BandLu::new(&band, lambda, tiny);
        // Deterministic, generic start vector.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        normalize(&mut v);
        let mut ok = false;
        for _ in 0..INVERSE_ITER_MAX {
            lu.solve(&mut v);
            for prev in &vectors {
                let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(x, p)| *x -= dot * p);
            }
            if normalize(&mut v) == 0.0 {
                break;
            }
            let av = band.matvec(&v);
            let res = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lambda * y).powi(2))
                .sum::<f64>()
                .sqrt();
            if res <= tol * norm {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NoConvergence {
                iterations: INVERSE_ITER_MAX,
                index: idx,
            });
        }
        vectors.push(v);
    }

    if let Some(perm) = perm {
        for v in vectors.iter_mut() {
            let mut orig = vec![0.0; n];
            for (new, &old) in perm.iter().enumerate() {
                orig[old] = v[new];
            }
            *v = orig;
        }
    }
    vectors.iter_mut().for_each(|v| fix_sign(v));
    Ok((values, vectors))
}

fn check_request(a: &BandedSym, n_eigs: usize) -> Result<()> {
    if n_eigs == 0 || n_eigs > a.dim {
        return Err(Error::InvalidParameter(format!(
            "requested {n_eigs} eigenvalues of a {}-dimensional matrix",
            a.dim
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngState;

    fn random_band(n: usize, w: usize, periodic: bool, seed: u64) -> BandedSym {
        let mut rng = RngState::new(seed);
        let mut a = BandedSym::zeros(n, w, periodic).unwrap();
        for i in 0..n {
            for o in 0..=w {
                if periodic || o <= i {
                    let j = (i + n - o) % n;
                    a.set(i, j, rng.uniform_in(-1.0, 1.0) + if o == 0 { 3.0 } else { 0.0 });
                }
            }
        }
        a
    }

    fn assert_matches_jacobi(a: &BandedSym, k: usize) {
        let (wj, _) = jacobi_eigh(&a.to_dense(), a.dim()).unwrap();
        let (w, v) = eigh(a, k, 1e-12).expect("eigh");
        let norm = a.norm_inf();
        for i in 0..k {
            assert!((w[i] - wj[i]).abs() < 1e-11 * norm, "{i}: {} vs {}", w[i], wj[i]);
            let av = a.matvec(&v[i]);
            let r: f64 = av
                .iter()
                .zip(&v[i])
                .map(|(x, y)| (x - w[i] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-12 * norm, "residual {r}");
        }
        for i in 0..k {
            for j in 0..k {
                let dot: f64 = v[i].iter().zip(&v[j]).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10, "({i},{j}) {dot}");
            }
        }
    }

    #[test]
    fn two_by_two_hand_solved() {
        let mut a = BandedSym::zeros(2, 1, false).unwrap();
        a.set(0, 0, 2.0);
        a.set(1, 1, 2.0);
        a.set(1, 0, 1.0);
        let w = eigvalsh(&a, 2).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_returns_sorted_diagonal() {
        let mut a = BandedSym::zeros(40, 2, false).unwrap();
        for i in 0..40 {
            a.set(i, i, ((i * 7919) % 40) as f64 - 20.0);
        }
        let w = eigvalsh(&a, 40).unwrap();
        let expect: Vec<f64> = (0..40).map(|i| i as f64 - 20.0).collect();
        assert_eq!(w, expect);
    }

    #[test]
    fn pentadiagonal_matches_jacobi() {
        assert_matches_jacobi(&random_band(60, 2, false, 3), 10);
    }

    #[test]
    fn wide_band_matches_jacobi() {
        assert_matches_jacobi(&random_band(50, 4, false, 5), 8);
    }

    #[test]
    fn periodic_band_matches_jacobi() {
        assert_matches_jacobi(&random_band(41, 2, true, 11), 12);
        assert_matches_jacobi(&random_band(40, 2, true, 12), 12);
    }

    #[test]
    fn degenerate_pair_stays_orthogonal() {
        // Two decoupled identical blocks give exactly degenerate eigenvalues.
        let mut a = BandedSym::zeros(40, 1, false).unwrap();
        for i in 0..40 {
            a.set(i, i, 2.0);
            if i % 20 != 19 && i + 1 < 40 {
                a.set(i + 1, i, -1.0);
            }
        }
        assert_matches_jacobi(&a, 6);
    }

    #[test]
    fn rejects_bad_requests() {
        let a = BandedSym::zeros(20, 2, false).unwrap();
        assert!(eigvalsh(&a, 0).is_err());
        assert!(eigvalsh(&a, 21).is_err());
        assert!(eigh(&a, 2, 0.0).is_err());
        assert!(BandedSym::zeros(4, 2, true).is_err());
    }
}
