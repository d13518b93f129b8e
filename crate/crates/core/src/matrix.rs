//! Dense complex matrices stored by columns-as-vectors, `p`-norms and the
//! structured generators the rest of the crate is tested on.
//!
//! A [`ColumnMatrix`] with `n_rows = N` and `n_cols = K` holds `K` vectors
//! `f_1, ..., f_K` of `C^N` as its columns. The sub-permanent functionals
//! are usually written with the vectors as the *rows* of a `K x N` matrix;
//! here that matrix is always passed in transposed form, i.e. as the
//! `N x K` column matrix built by [`ColumnMatrix::from_vectors`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math::{powf, sqrt};
use crate::{Error, Result};

/// Tolerance on `|xi_j| = 1` for the rank-one constructor.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Exponent `1 <= p < inf` of an `l_p` norm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::Exponent {
                p,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        Ok(PExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Seed for every randomized routine; identical seeds give identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `index` derived from this seed.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomMode {
    /// Real and imaginary parts i.i.d. standard normal.
    ComplexGaussian,
    /// Real entries i.i.d. uniform on `[0, 1)`.
    NonnegUniform,
}

/// `N x K` complex matrix, `1 <= K <= N`, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl ColumnMatrix {
    /// Builds from row-major entries.
    pub fn from_row_major(n_rows: usize, n_cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::Dimension(
                "matrix must have at least one row and column",
            ));
        }
        if n_cols > n_rows {
            return Err(Error::Dimension("more columns than rows"));
        }
        if data.len() != n_rows * n_cols {
            return Err(Error::Dimension("entry count does not match shape"));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ColumnMatrix {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged rows"));
        }
        Self::from_row_major(n_rows, n_cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Matrix whose `k`-th column is `vectors[k]`.
    ///
    /// This is the transposed view of the `K x N` matrix with the vectors as
    /// rows.
    pub fn from_vectors(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let n_cols = vectors.len();
        let n_rows = vectors.first().map_or(0, Vec::len);
        if vectors.iter().any(|v| v.len() != n_rows) {
            return Err(Error::Dimension("vectors of different lengths"));
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for j in 0..n_rows {
            data.extend(vectors.iter().map(|v| v[j]));
        }
        Self::from_row_major(n_rows, n_cols, data)
    }

    pub fn from_real_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let vectors: Vec<Vec<Complex64>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_vectors(&vectors)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            data[j * n + j] = Complex64::new(1.0, 0.0);
        }
        Self::from_row_major(n, n, data)
    }

    pub fn ones(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::from_row_major(
            n_rows,
            n_cols,
            vec![Complex64::new(1.0, 0.0); n_rows * n_cols],
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n_cols + col]
    }

    /// Sets one entry. Non-finite values are rejected.
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) -> Result<()> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite);
        }
        self.data[row * self.n_cols + col] = value;
        Ok(())
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.n_rows).map(|j| self.get(j, col)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.n_cols).map(|k| self.column(k)).collect()
    }

    /// Transpose of a square matrix.
    ///
    /// A non-square `N x K` matrix has no transpose in this type (it would
    /// have more columns than rows); use [`ColumnMatrix::from_vectors`] to
    /// move between the row and column conventions instead.
    pub fn transpose(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("transpose needs a square matrix"));
        }
        let n = self.n_rows;
        let data = (0..n * n).map(|i| self.get(i % n, i / n)).collect();
        Self::from_row_major(n, n, data)
    }

    /// Entrywise modulus, as a real matrix.
    pub fn abs(&self) -> Self {
        ColumnMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self
                .data
                .iter()
                .map(|z| Complex64::new(z.norm(), 0.0))
                .collect(),
        }
    }

    /// Real parts, if every imaginary part is exactly zero.
    pub fn real_entries(&self) -> Option<Vec<f64>> {
        self.data
            .iter()
            .map(|z| if z.im == 0.0 { Some(z.re) } else { None })
            .collect()
    }

    /// True if every entry is real and `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0 && z.re >= 0.0)
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Result<Self> {
        Self::from_row_major(
            self.n_rows,
            self.n_cols,
            self.data.iter().map(|&z| f(z)).collect(),
        )
    }

    pub fn scale_column(&mut self, col: usize, c: Complex64) {
        for j in 0..self.n_rows {
            self.data[j * self.n_cols + col] *= c;
        }
    }

    /// Square submatrix on the given rows and all columns (needs `rows.len() == n_cols`).
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.len() != self.n_cols {
            return Err(Error::Dimension("row selection must match column count"));
        }
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self::from_row_major(rows.len(), self.n_cols, data)
    }

    /// `l_2` norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.n_cols).map(|k| l2_norm(&self.column(k))).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    scale * sqrt(v.iter().map(|z| (z.norm() / scale).powi(2)).sum::<f64>())
}

/// `(sum_k |v_k|^p)^{1/p}`, computed with max-scaling so large or tiny
/// entries do not overflow.
pub fn p_norm(v: &[Complex64], p: PExponent) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Dimension("empty vector"));
    }
    if v.iter().any(|z| z.re.is_nan() || z.im.is_nan()) {
        return Err(Error::NonFinite);
    }
    Ok(p_norm_unchecked(v.iter().map(|z| z.norm()), p.value()))
}

/// `l_p` norm of nonnegative magnitudes; `p = inf` gives the max.
pub(crate) fn p_norm_unchecked(mags: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let scale = mags.clone().fold(0.0, f64::max);
    if scale == 0.0 || p.is_infinite() {
        return scale;
    }
    if p == 2.0 {
        return scale * sqrt(mags.map(|m| (m / scale) * (m / scale)).sum::<f64>());
    }
    scale * powf(mags.map(|m| powf(m / scale, p)).sum::<f64>(), 1.0 / p)
}

/// Max norm of a complex vector.
pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `F[j][k] = xi_j zeta_k r_k`: rank one, column `k` of constant modulus `r_k`.
pub fn make_rank_one_constant_modulus(
    n: usize,
    xi: &[Complex64],
    zeta: &[Complex64],
    r: &[f64],
) -> Result<ColumnMatrix> {
    if xi.len() != n || zeta.len() != n || r.len() != n {
        return Err(Error::Dimension("xi, zeta and r must have length n"));
    }
    for (index, z) in xi.iter().chain(zeta).enumerate() {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::NotUnitModulus {
                index: index % n,
                modulus,
            });
        }
    }
    if r.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Sign("r must be strictly positive"));
    }
    let mut data = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            data.push(xi[j] * zeta[k] * r[k]);
        }
    }
    ColumnMatrix::from_row_major(n, n, data)
}

/// The 3x3 circulant with columns `(1, x, y)`, `(y, 1, x)`, `(x, y, 1)`.
pub fn make_circulant3(x: f64, y: f64) -> Result<ColumnMatrix> {
    ColumnMatrix::from_real_rows(&[vec![1.0, y, x], vec![x, 1.0, y], vec![y, x, 1.0]])
}

pub fn random_matrix(n: usize, k: usize, mode: RandomMode, seed: RngSeed) -> Result<ColumnMatrix> {
    let mut rng = seed.rng();
    random_matrix_with(n, k, mode, &mut rng)
}

/// Same as [`random_matrix`] but drawing from a caller-owned generator, for
/// batches.
pub fn random_matrix_with<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    mode: RandomMode,
    rng: &mut R,
) -> Result<ColumnMatrix> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::Dimension("need n >= 1 and 1 <= k <= n"));
    }
    let data = (0..n * k)
        .map(|_| match mode {
            RandomMode::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            }
            RandomMode::NonnegUniform => Complex64::new(rng.random::<f64>(), 0.0),
        })
        .collect();
    ColumnMatrix::from_row_major(n, k, data)
}

/// Random point on the unit circle.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * core::f64::consts::TAU)
}
