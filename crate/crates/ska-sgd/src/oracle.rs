//! Independent reference computations used by verification code and tests.
//!
//! Everything here is deliberately brute force (cyclic Jacobi eigensolves,
//! explicit Gram matrices, finite differences) so it shares no code path
//! with the streaming solver or the optimizers it checks.

use crate::numerics::{dot, norm2, thin_qr, DenseMatrix, DenseVector};

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method,
/// ascending. Suitable for the moderate sizes used in tests (d ≤ ~500).
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut m = a.clone();
    m.symmetrize();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + m.frobenius_norm()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/cols p and q
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Singular values of a general matrix, descending, via the eigenvalues
/// of the smaller of `AᵀA` / `AAᵀ`.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let gram = if a.rows() >= a.cols() {
        a.transpose().matmat(a)
    } else {
        a.matmat(&a.transpose())
    };
    let mut sv: Vec<f64> = symmetric_eigenvalues(&gram)
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// 2-norm condition number from a dense eigensolve of a symmetric matrix.
pub fn condition_number_sym(a: &DenseMatrix) -> f64 {
    let eigs = symmetric_eigenvalues(a);
    let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min).abs();
    let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).abs();
    hi / lo
}

/// Spectral norm of a symmetric matrix from the dense eigensolve.
pub fn spectral_norm_sym(a: &DenseMatrix) -> f64 {
    symmetric_eigenvalues(a)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Principal angles (radians, ascending) between the column spans of two
/// matrices with the same row dimension.
pub fn principal_angles(a: &DenseMatrix, b: &DenseMatrix) -> Vec<f64> {
    let (qa, _) = thin_qr(a).expect("principal_angles: first span is rank deficient");
    let (qb, _) = thin_qr(b).expect("principal_angles: second span is rank deficient");
    let m = qa.transpose().matmat(&qb);
    let mut cosines = singular_values(&m);
    cosines.sort_by(|a, b| b.partial_cmp(a).unwrap());
    cosines
        .into_iter()
        .map(|c| c.clamp(-1.0, 1.0).acos())
        .collect()
}

/// Central finite-difference gradient of a scalar function.
pub fn finite_difference_gradient<F: Fn(&DenseVector) -> f64>(
    f: F,
    x: &DenseVector,
    h: f64,
) -> DenseVector {
    let mut g = DenseVector::zeros(x.len());
    let mut xp = x.clone();
    for i in 0..x.len() {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// One classical forward Gauss-Seidel sweep on the explicitly formed
/// system `(PᵀP + λI) α = Pᵀ g`, starting from `alpha`.
///
/// This materializes the full Gram matrix on purpose: it is the reference
/// the streaming formulation is checked against.
pub fn classical_gs_sweep(
    p: &DenseMatrix,
    g: &DenseVector,
    lambda: f64,
    alpha: &mut DenseVector,
) {
    let s = p.cols();
    assert_eq!(alpha.len(), s);
    let mut gram = p.transpose().matmat(p);
    for i in 0..s {
        gram[(i, i)] += lambda;
    }
    let b = p.tr_matvec(g);
    for i in 0..s {
        let mut acc = b[i];
        for j in 0..s {
            if j != i {
                acc -= gram[(i, j)] * alpha[j];
            }
        }
        alpha[i] = acc / gram[(i, i)];
    }
}

/// Explicit Krylov basis `[g, Hg, H²g, …]` with `s` columns, each
/// normalized before the next multiply to avoid overflow. Reference
/// construction for subspace-angle diagnostics.
pub fn explicit_krylov_basis(h: &DenseMatrix, g: &DenseVector, s: usize) -> DenseMatrix {
    let mut cols = Vec::with_capacity(s);
    let mut v = g.clone();
    for _ in 0..s {
        let mut c = v.clone();
        let n = norm2(c.as_slice());
        assert!(n > 0.0, "explicit_krylov_basis: zero column");
        c.scale(1.0 / n);
        cols.push(c.clone());
        v = h.matvec(&c);
    }
    DenseMatrix::from_columns(&cols)
}
