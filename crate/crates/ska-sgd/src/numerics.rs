//! Dense column-major linear algebra over `f64` and seeded randomness.
//!
//! Everything in this module is deterministic: operations are pure
//! functions of their inputs (including the [`RandomSource`] state), loops
//! run in a fixed order, and no accumulation is reordered. Two runs with
//! the same seed produce bit-identical results on the same platform.

use crate::error::{Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative threshold below which an R diagonal counts as rank deficient.
pub const QR_RANK_TOL: f64 = 1e-14;

/// Seeded, platform-independent random stream.
///
/// The integer stream is ChaCha8 keyed by `seed_from_u64`, which is
/// bit-exact across platforms and crate versions. Derived variates use
/// fixed transforms:
///
/// * `next_f64`: take the top 53 bits of one `u64`, scale by 2⁻⁵³ (uniform
///   on `[0, 1)`).
/// * `next_normal`: Box-Muller, cosine branch only. Draw `u1` on `(0, 1]`
///   as `((x >> 11) + 1)·2⁻⁵³` and `u2` on `[0, 1)`, then return
///   `sqrt(-2 ln u1)·cos(2π u2)`. Exactly two `u64` draws per variate.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed this source was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate (Box-Muller, cosine branch).
    pub fn next_normal(&mut self) -> f64 {
        let scale = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * scale; // (0, 1]
        let u2 = (self.next_u64() >> 11) as f64 * scale; // [0, 1)
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Child stream seeded from the next integer of this stream.
    pub fn fork(&mut self) -> RandomSource {
        RandomSource::new(self.next_u64())
    }
}

/// Dense vector of 64-bit floats. Always non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "DenseVector length must be positive");
        Self {
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        assert!(!data.is_empty(), "DenseVector length must be positive");
        Self { data }
    }

    pub fn from_slice(data: &[f64]) -> Self {
        Self::from_vec(data.to_vec())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &DenseVector) {
        axpy(alpha, other.as_slice(), self.as_mut_slice());
    }

    pub fn scale(&mut self, alpha: f64) {
        for x in &mut self.data {
            *x *= alpha;
        }
    }

    /// Elementwise product, `self[i] *= other[i]`.
    pub fn hadamard(&mut self, other: &DenseVector) {
        assert_eq!(self.len(), other.len());
        for (x, y) in self.data.iter_mut().zip(other.iter()) {
            *x *= *y;
        }
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// Dense column-major matrix of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "DenseMatrix dims must be positive");
        Self {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from column vectors (all of equal length).
    pub fn from_columns(cols: &[DenseVector]) -> Self {
        assert!(!cols.is_empty());
        let rows = cols[0].len();
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            m.col_mut(j).copy_from_slice(c.as_slice());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column `j` as a slice (column-major storage makes this free).
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_vector(&self, j: usize) -> DenseVector {
        DenseVector::from_slice(self.col(j))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `y = A x`
    pub fn matvec(&self, x: &DenseVector) -> DenseVector {
        assert_eq!(x.len(), self.cols, "matvec dim mismatch");
        let mut y = DenseVector::zeros(self.rows);
        for j in 0..self.cols {
            axpy(x[j], self.col(j), y.as_mut_slice());
        }
        y
    }

    /// `y = Aᵀ x`
    pub fn tr_matvec(&self, x: &DenseVector) -> DenseVector {
        assert_eq!(x.len(), self.rows, "tr_matvec dim mismatch");
        let mut y = DenseVector::zeros(self.cols);
        for j in 0..self.cols {
            y[j] = dot(self.col(j), x.as_slice());
        }
        y
    }

    /// `C = A B`
    pub fn matmat(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, b.rows, "matmat dim mismatch");
        let mut c = DenseMatrix::zeros(self.rows, b.cols);
        for j in 0..b.cols {
            let bj = b.col(j);
            let cj = c.col_mut(j);
            for (k, &bkj) in bj.iter().enumerate() {
                axpy(bkj, self.col(k), cj);
            }
        }
        c
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Scale column `j` by `s[j]` in place.
    pub fn scale_columns(&mut self, s: &DenseVector) {
        assert_eq!(s.len(), self.cols);
        for j in 0..self.cols {
            let sj = s[j];
            for x in self.col_mut(j) {
                *x *= sj;
            }
        }
    }

    /// Replace by `(A + Aᵀ)/2` (square matrices only).
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..j {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        acc += a * b;
    }
    acc
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Matrix with i.i.d. standard normal entries, filled column by column.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut RandomSource) -> DenseMatrix {
    assert!(rows >= 1 && cols >= 1);
    let mut m = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        for x in m.col_mut(j) {
            *x = rng.next_normal();
        }
    }
    m
}

pub fn gaussian_vector(len: usize, rng: &mut RandomSource) -> DenseVector {
    let mut v = DenseVector::zeros(len);
    for x in v.as_mut_slice() {
        *x = rng.next_normal();
    }
    v
}

/// `count` points spaced so consecutive ratios are constant, from `lo` to
/// `hi` inclusive. Endpoints are exact; `count == 1` returns `(lo)`.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Result<DenseVector> {
    if !(lo > 0.0) || !(hi > 0.0) {
        return Err(Error::InvalidRange(format!(
            "logspace needs positive endpoints, got ({lo}, {hi})"
        )));
    }
    assert!(count >= 1);
    let mut v = DenseVector::zeros(count);
    v[0] = lo;
    if count == 1 {
        return Ok(v);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    for i in 1..count - 1 {
        let t = i as f64 / (count - 1) as f64;
        v[i] = (llo + t * (lhi - llo)).exp();
    }
    v[count - 1] = hi;
    Ok(v)
}

/// Thin Householder QR of an m×n matrix with m ≥ n.
///
/// Returns `(Q, R)` with orthonormal Q (m×n), upper-triangular R (n×n)
/// with nonnegative diagonal, and `Q R = M`. Fails with `RankDeficient`
/// when any `|R[j,j]| < 1e-14·‖M‖_F`.
pub fn thin_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, cols) = (m.rows(), m.cols());
    assert!(rows >= cols, "thin_qr needs rows >= cols");
    let frob = m.frobenius_norm();
    let mut a = m.clone();
    // Householder reflectors: v (length rows-k) and beta = 2/vᵀv.
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(cols);
    for k in 0..cols {
        let normx = norm2(&a.col(k)[k..]);
        let alpha = if a[(k, k)] >= 0.0 { -normx } else { normx };
        let mut v = a.col(k)[k..].to_vec();
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };
        a[(k, k)] = alpha;
        for i in k + 1..rows {
            a[(i, k)] = 0.0;
        }
        for j in k + 1..cols {
            let s = beta * dot(&v, &a.col(j)[k..]);
            axpy(-s, &v, &mut a.col_mut(j)[k..]);
        }
        reflectors.push((v, beta));
    }
    let mut r = DenseMatrix::zeros(cols, cols);
    for j in 0..cols {
        for i in 0..=j {
            r[(i, j)] = a[(i, j)];
        }
    }
    let threshold = QR_RANK_TOL * frob;
    for j in 0..cols {
        if r[(j, j)].abs() < threshold {
            return Err(Error::RankDeficient {
                index: j,
                value: r[(j, j)].abs(),
                threshold,
            });
        }
    }
    // Q = H_0 H_1 ... H_{n-1} [I_n; 0]
    let mut q = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        let qj = q.col_mut(j);
        qj[j] = 1.0;
        for k in (0..cols).rev() {
            let (v, beta) = &reflectors[k];
            let s = beta * dot(v, &qj[k..]);
            axpy(-s, v, &mut qj[k..]);
        }
    }
    // Fix signs so the R diagonal is nonnegative.
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            for x in q.col_mut(j) {
                *x = -*x;
            }
            for c in j..cols {
                r[(j, c)] = -r[(j, c)];
            }
        }
    }
    Ok((q, r))
}

/// Solve `A x = b` for symmetric positive definite `A` by Cholesky.
pub fn cholesky_solve(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    let l = cholesky_factor(a)?;
    let n = a.rows();
    // forward: L y = b
    let mut y = b.clone();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    // backward: Lᵀ x = y
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    Ok(y)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky_factor(a: &DenseMatrix) -> Result<DenseMatrix> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotSpd(d, j));
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}
