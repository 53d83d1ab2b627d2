//! Krylov basis construction from stochastic gradients.
//!
//! Columns come from one of two sources: a rolling buffer of recent
//! gradients, or same-iteration finite-difference perturbations of the
//! current gradient. Either set of columns can be used as a normalized
//! monomial basis or transformed by the Chebyshev three-term recurrence
//! and orthonormalized with a final QR.

use crate::error::{Error, Result};
use crate::numerics::{norm2, thin_qr, DenseMatrix, DenseVector};

/// Columns below this norm count as vanished.
const ZERO_COL_TOL: f64 = 1e-300;

/// Where the raw columns came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisSource {
    /// Rolling buffer of recent gradients (newest first).
    History,
    /// Finite-difference perturbations on a fixed mini-batch.
    Perturbation,
}

/// How the raw columns were turned into a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Monomial,
    Chebyshev,
}

/// Spectrum bounds `[a, b]` for the Chebyshev map onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevParams {
    pub a: f64,
    pub b: f64,
}

impl ChebyshevParams {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(b > a && a > 0.0, "need b > a > 0");
        Self { a, b }
    }

    pub fn scale(&self) -> f64 {
        2.0 / (self.b - self.a)
    }

    pub fn shift(&self) -> f64 {
        (self.a + self.b) / (self.b - self.a)
    }
}

impl Default for ChebyshevParams {
    fn default() -> Self {
        Self { a: 0.01, b: 10.0 }
    }
}

/// An n×s_eff basis with construction metadata.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    pub z: DenseMatrix,
    pub source: BasisSource,
    pub kind: BasisKind,
    pub orthonormalized: bool,
}

impl KrylovBasis {
    /// Number of usable basis columns (may be less than requested when
    /// the QR dropped dependent trailing columns).
    pub fn s_eff(&self) -> usize {
        self.z.cols()
    }
}

/// Rolling gradient buffer, newest first, bounded capacity.
#[derive(Debug, Clone)]
pub struct GradientBuffer {
    cols: std::collections::VecDeque<DenseVector>,
    capacity: usize,
    dim: usize,
}

impl GradientBuffer {
    pub fn new(dim: usize, capacity: usize) -> Self {
        assert!(capacity >= 1 && dim >= 1);
        Self {
            cols: std::collections::VecDeque::with_capacity(capacity),
            capacity,
            dim,
        }
    }

    pub fn fill(&self) -> usize {
        self.cols.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Insert `g` as column 0, evicting the oldest column at capacity.
    pub fn push(&mut self, g: DenseVector) -> Result<()> {
        if g.len() != self.dim {
            return Err(Error::DimMismatch(format!(
                "buffer dim {} vs gradient dim {}",
                self.dim,
                g.len()
            )));
        }
        if self.cols.len() == self.capacity {
            self.cols.pop_back();
        }
        self.cols.push_front(g);
        Ok(())
    }

    pub fn column(&self, i: usize) -> &DenseVector {
        &self.cols[i]
    }

    /// Materialize the buffer as a matrix, newest gradient in column 0.
    pub fn as_matrix(&self) -> DenseMatrix {
        assert!(!self.cols.is_empty(), "empty gradient buffer");
        let cols: Vec<DenseVector> = self.cols.iter().cloned().collect();
        DenseMatrix::from_columns(&cols)
    }
}

/// Build perturbation columns around `w` on a fixed mini-batch.
///
/// Column 0 is `g1`, the (already preconditioned, when applicable)
/// gradient at `w`. Column i (i ≥ 1) is the oracle gradient at
/// `w + delta·column_{i-1}`, scaled elementwise by `d_inv` when given.
/// The oracle must evaluate on the same mini-batch for every call.
pub fn perturbation_columns<F>(
    grad_oracle: F,
    w: &DenseVector,
    g1: &DenseVector,
    s: usize,
    delta: f64,
    d_inv: Option<&DenseVector>,
) -> Result<DenseMatrix>
where
    F: Fn(&DenseVector) -> Result<DenseVector>,
{
    assert!(s >= 1 && delta > 0.0);
    let mut cols = Vec::with_capacity(s);
    cols.push(g1.clone());
    for i in 1..s {
        let mut point = w.clone();
        point.add_scaled(delta, &cols[i - 1]);
        let mut g = grad_oracle(&point)?;
        if let Some(scaling) = d_inv {
            g.hadamard(scaling);
        }
        cols.push(g);
    }
    Ok(DenseMatrix::from_columns(&cols))
}

/// Normalized raw columns: unit length, no QR, not orthonormal.
pub fn monomial_basis(cols: &DenseMatrix, source: BasisSource) -> Result<KrylovBasis> {
    let mut z = cols.clone();
    for j in 0..z.cols() {
        let n = norm2(z.col(j));
        if n < ZERO_COL_TOL {
            return Err(Error::ZeroVector(j));
        }
        let inv = 1.0 / n;
        for x in z.col_mut(j) {
            *x *= inv;
        }
    }
    Ok(KrylovBasis {
        z,
        source,
        kind: BasisKind::Monomial,
        orthonormalized: false,
    })
}

/// The Chebyshev recurrence applied to the first `s` columns of `G`,
/// before orthonormalization. Column indexing follows the construction
/// verbatim: with 0-based columns,
///
/// ```text
/// Z[0] = G[0]/‖G[0]‖
/// Z[1] = normalize(scale·G[1] − shift·Z[0])
/// Z[j] = normalize(2(scale·G[j−1] − shift·Z[j−1]) − Z[j−2])   j ≥ 2
/// ```
pub fn chebyshev_recurrence(
    g: &DenseMatrix,
    s: usize,
    params: &ChebyshevParams,
) -> Result<DenseMatrix> {
    assert!(s >= 1 && g.cols() >= s, "need at least s columns");
    let scale = params.scale();
    let shift = params.shift();
    let mut z = DenseMatrix::zeros(g.rows(), s);

    let normalize_into = |col: &mut [f64], idx: usize| -> Result<()> {
        let n = norm2(col);
        if n < ZERO_COL_TOL {
            return Err(Error::ZeroVector(idx));
        }
        let inv = 1.0 / n;
        for x in col {
            *x *= inv;
        }
        Ok(())
    };

    z.col_mut(0).copy_from_slice(g.col(0));
    normalize_into(z.col_mut(0), 0)?;
    if s > 1 {
        let mut c = g.col(1).to_vec();
        for (x, z0) in c.iter_mut().zip(z.col(0)) {
            *x = scale * *x - shift * z0;
        }
        normalize_into(&mut c, 1)?;
        z.col_mut(1).copy_from_slice(&c);
        for j in 2..s {
            let mut c = g.col(j - 1).to_vec();
            let (zprev, zprev2) = (z.col(j - 1).to_vec(), z.col(j - 2).to_vec());
            for ((x, zp), zp2) in c.iter_mut().zip(&zprev).zip(&zprev2) {
                *x = 2.0 * (scale * *x - shift * zp) - zp2;
            }
            normalize_into(&mut c, j)?;
            z.col_mut(j).copy_from_slice(&c);
        }
    }
    Ok(z)
}

/// Chebyshev basis: three-term recurrence, then a thin-QR
/// orthonormalization. Trailing columns that come out linearly dependent
/// are dropped, so the result can have `s_eff < s` columns.
pub fn chebyshev_basis(
    g: &DenseMatrix,
    s: usize,
    params: &ChebyshevParams,
    source: BasisSource,
) -> Result<KrylovBasis> {
    let pre = chebyshev_recurrence(g, s, params)?;
    let z = orthonormalize_dropping_trailing(pre)?;
    Ok(KrylovBasis {
        z,
        source,
        kind: BasisKind::Chebyshev,
        orthonormalized: true,
    })
}

/// QR-orthonormalize, dropping dependent trailing columns on rank
/// deficiency, and force a nonnegative first nonzero entry per column so
/// outputs are reproducible.
fn orthonormalize_dropping_trailing(mut m: DenseMatrix) -> Result<DenseMatrix> {
    loop {
        match thin_qr(&m) {
            Ok((mut q, _)) => {
                fix_column_signs(&mut q);
                return Ok(q);
            }
            Err(Error::RankDeficient { index, .. }) => {
                if index == 0 {
                    return Err(Error::ZeroVector(0));
                }
                let kept: Vec<DenseVector> = (0..index).map(|j| m.col_vector(j)).collect();
                m = DenseMatrix::from_columns(&kept);
            }
            Err(e) => return Err(e),
        }
    }
}

fn fix_column_signs(q: &mut DenseMatrix) {
    for j in 0..q.cols() {
        let col = q.col(j);
        let lead = col.iter().find(|x| **x != 0.0).copied().unwrap_or(0.0);
        if lead < 0.0 {
            for x in q.col_mut(j) {
                *x = -*x;
            }
        }
    }
}
