//! Synthetic test problems with exactly controlled spectra.
//!
//! Three families: log-spaced-spectrum quadratics, clustered-spectrum
//! quadratics (80% of eigenvalues near 1, 20% near 10), and binary
//! logistic regression with a geometrically spaced feature covariance.
//! Every generator is a pure function of its parameters and the seed, and
//! each problem carries exact-optimum metadata so error metrics need no
//! reference runs.

use crate::error::{Error, Result};
use crate::numerics::{
    cholesky_solve, gaussian_matrix, gaussian_vector, logspace, norm2, thin_qr, DenseMatrix,
    DenseVector, RandomSource,
};

/// `f(x) = ½ xᵀHx − bᵀx` with SPD `H`, known optimum, and additive
/// Gaussian gradient noise of standard deviation `noise_sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    pub h: DenseMatrix,
    pub b: DenseVector,
    pub x_star: DenseVector,
    pub f_star: f64,
    pub kappa: f64,
    pub noise_sigma: f64,
}

/// Same layout as [`QuadraticProblem`]; built by [`gen_clustered`] with a
/// two-cluster spectrum instead of a log-spaced one.
pub type ClusteredSpectrumProblem = QuadraticProblem;

impl QuadraticProblem {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn loss(&self, x: &DenseVector) -> f64 {
        let hx = self.h.matvec(x);
        0.5 * crate::numerics::dot(hx.as_slice(), x.as_slice())
            - crate::numerics::dot(self.b.as_slice(), x.as_slice())
    }

    /// Exact gradient `Hx − b`.
    pub fn exact_gradient(&self, x: &DenseVector) -> DenseVector {
        let mut g = self.h.matvec(x);
        g.add_scaled(-1.0, &self.b);
        g
    }

    /// Inverse Hessian diagonal, the Jacobi scaling for this family.
    pub fn jacobi_scaling(&self) -> DenseVector {
        let d = self.dim();
        let mut v = DenseVector::zeros(d);
        for i in 0..d {
            v[i] = 1.0 / self.h[(i, i)];
        }
        v
    }
}

/// Stochastic gradient `Hx − b + ε` with `ε ~ N(0, noise_sigma²·I)`.
/// `noise_sigma == 0` returns the exact gradient and draws nothing.
pub fn quad_gradient(p: &QuadraticProblem, x: &DenseVector, rng: &mut RandomSource) -> DenseVector {
    let mut g = p.exact_gradient(x);
    if p.noise_sigma != 0.0 {
        for gi in g.as_mut_slice() {
            *gi += p.noise_sigma * rng.next_normal();
        }
    }
    g
}

/// Quadratic with eigenvalues log-spaced on `[1, kappa]`.
///
/// `H = QΛQᵀ` for a random orthogonal `Q` (QR of a Gaussian matrix),
/// `b ~ N(0, I)`, and `x* = H⁻¹b` from a dense Cholesky solve. Draw order:
/// `Q`, then `b`.
pub fn gen_quadratic(
    d: usize,
    kappa: f64,
    noise_sigma: f64,
    rng: &mut RandomSource,
) -> Result<QuadraticProblem> {
    assert!(d >= 2 && kappa >= 1.0);
    let lambda = logspace(1.0, kappa, d)?;
    build_quadratic(&lambda, kappa, noise_sigma, rng)
}

/// Quadratic with `⌈0.8d⌉` eigenvalues in `[0.95, 1.05]` and the rest in
/// `[9.5, 10.5]` (each `center·(1 + u)`, `u` uniform on `±0.05`).
pub fn gen_clustered(
    d: usize,
    noise_sigma: f64,
    rng: &mut RandomSource,
) -> Result<ClusteredSpectrumProblem> {
    assert!(d >= 2);
    let low_count = (0.8 * d as f64).ceil() as usize;
    let mut lambda = DenseVector::zeros(d);
    for i in 0..d {
        let center = if i < low_count { 1.0 } else { 10.0 };
        let u = (rng.next_f64() * 2.0 - 1.0) * 0.05;
        lambda[i] = center * (1.0 + u);
    }
    let kappa = lambda.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / lambda.iter().cloned().fold(f64::INFINITY, f64::min);
    build_quadratic(&lambda, kappa, noise_sigma, rng)
}

fn build_quadratic(
    lambda: &DenseVector,
    kappa: f64,
    noise_sigma: f64,
    rng: &mut RandomSource,
) -> Result<QuadraticProblem> {
    let d = lambda.len();
    let (q, _) = thin_qr(&gaussian_matrix(d, d, rng))?;
    let mut ql = q.clone();
    ql.scale_columns(lambda);
    let mut h = ql.matmat(&q.transpose());
    h.symmetrize();
    let b = gaussian_vector(d, rng);
    let x_star = cholesky_solve(&h, &b)?;
    let mut p = QuadraticProblem {
        h,
        b,
        x_star,
        f_star: 0.0,
        kappa,
        noise_sigma,
    };
    p.f_star = p.loss(&p.x_star);
    Ok(p)
}

/// Binary logistic regression with feature covariance `UΣ²Uᵀ`,
/// `σᵢ = κ^{−(i−1)/(d−1)}`, generating vector `w*` with eigenbasis
/// components `∝ 1/√σᵢ` (unit norm overall), and labels
/// `yᵢ = sign(xᵢᵀw* + εᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticProblem {
    /// n×d data matrix.
    pub x: DenseMatrix,
    /// ±1 labels, length n.
    pub y: DenseVector,
    /// Generating weight vector (unit norm); reference point for error
    /// metrics, not the regularized-loss minimizer.
    pub w_star: DenseVector,
    pub lambda_reg: f64,
    pub kappa: f64,
}

impl LogisticProblem {
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }
}

/// Generate a logistic problem.
///
/// `label_noise` is relative: the label noise `εᵢ` has standard deviation
/// `label_noise · std(xᵢᵀw*)`, so difficulty is comparable across `d` and
/// `kappa`; 0 disables it and the data is separable by `w*`. The ridge
/// weight is `lambda_scale / kappa`. Draw order: `U`, `Z`, label noise.
/// `sign(0)` counts as `+1`.
pub fn gen_logistic(
    n: usize,
    d: usize,
    kappa: f64,
    label_noise: f64,
    lambda_scale: f64,
    rng: &mut RandomSource,
) -> Result<LogisticProblem> {
    assert!(n > d && d >= 2, "need n > d >= 2");
    assert!(kappa >= 1.0);
    let mut sigma = DenseVector::zeros(d);
    for i in 0..d {
        sigma[i] = kappa.powf(-(i as f64) / (d as f64 - 1.0));
    }
    let (u, _) = thin_qr(&gaussian_matrix(d, d, rng))?;
    let mut us = u.clone();
    us.scale_columns(&sigma);
    let m = us.matmat(&u.transpose());
    let z = gaussian_matrix(n, d, rng);
    let x = z.matmat(&m);

    // w* = U c with cᵢ ∝ 1/√σᵢ, normalized to unit length.
    let mut c = DenseVector::zeros(d);
    for i in 0..d {
        c[i] = 1.0 / sigma[i].sqrt();
    }
    let mut w_star = u.matvec(&c);
    let nw = norm2(w_star.as_slice());
    w_star.scale(1.0 / nw);

    let logits = x.matvec(&w_star);
    let mean: f64 = logits.iter().sum::<f64>() / n as f64;
    let var: f64 = logits.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n as f64;
    let noise_std = label_noise * var.sqrt();

    let mut y = DenseVector::zeros(n);
    for i in 0..n {
        let noisy = logits[i]
            + if noise_std > 0.0 {
                noise_std * rng.next_normal()
            } else {
                0.0
            };
        y[i] = if noisy >= 0.0 { 1.0 } else { -1.0 };
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateLabels(y[0]));
    }
    Ok(LogisticProblem {
        x,
        y,
        w_star,
        lambda_reg: lambda_scale / kappa,
        kappa,
    })
}

/// Regularized mean log-loss
/// `(1/n) Σ log(1 + exp(−yᵢ xᵢᵀw)) + (λ/2)‖w‖²`,
/// evaluated with the stable `log1p` branches.
pub fn logistic_loss(p: &LogisticProblem, w: &DenseVector) -> f64 {
    assert_eq!(w.len(), p.dim());
    let logits = p.x.matvec(w);
    let mut acc = 0.0;
    for i in 0..p.n() {
        acc += log1p_exp_neg(p.y[i] * logits[i]);
    }
    let wn = norm2(w.as_slice());
    acc / p.n() as f64 + 0.5 * p.lambda_reg * wn * wn
}

/// `log(1 + exp(−t))` without overflow for large `|t|`.
fn log1p_exp_neg(t: f64) -> f64 {
    if t >= 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// Mini-batch gradient
/// `−(1/|B|) Σ_{i∈B} yᵢ·s(−yᵢ xᵢᵀw)·xᵢ + λw`
/// where `s` is the logistic sigmoid.
pub fn logistic_minibatch_gradient(
    p: &LogisticProblem,
    w: &DenseVector,
    batch: &[usize],
) -> Result<DenseVector> {
    assert!(!batch.is_empty(), "empty mini-batch");
    let (n, d) = (p.n(), p.dim());
    assert_eq!(w.len(), d);
    for &i in batch {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
    }
    // coefᵢ = −yᵢ · s(−yᵢ zᵢ) / |B|  with zᵢ = xᵢᵀw
    let inv_m = 1.0 / batch.len() as f64;
    let coefs: Vec<f64> = batch
        .iter()
        .map(|&i| {
            let z: f64 = (0..d).map(|j| p.x[(i, j)] * w[j]).sum();
            -p.y[i] * sigmoid(-p.y[i] * z) * inv_m
        })
        .collect();
    let mut g = DenseVector::zeros(d);
    for j in 0..d {
        let col = p.x.col(j);
        let mut acc = 0.0;
        for (&i, &c) in batch.iter().zip(coefs.iter()) {
            acc += c * col[i];
        }
        g[j] = acc + p.lambda_reg * w[j];
    }
    Ok(g)
}

fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Jacobi scaling `D⁻¹ⱼ = 1 / Σᵢ Xᵢⱼ²`. A zero column maps to 1.0 with a
/// warning on stderr so long sweeps survive degenerate seeds.
pub fn jacobi_preconditioner(p: &LogisticProblem) -> DenseVector {
    let d = p.dim();
    let mut v = DenseVector::zeros(d);
    for j in 0..d {
        let s = crate::numerics::dot(p.x.col(j), p.x.col(j));
        if s == 0.0 {
            eprintln!("warning: zero column {j} in data matrix, Jacobi entry set to 1");
            v[j] = 1.0;
        } else {
            v[j] = 1.0 / s;
        }
    }
    v
}

/// Without-replacement mini-batch index stream. Each epoch is a fresh
/// random permutation served in `batch_size` chunks (last chunk short).
#[derive(Debug, Clone)]
pub struct MiniBatchSampler {
    n: usize,
    batch_size: usize,
    rng: RandomSource,
    perm: Vec<usize>,
    cursor: usize,
}

impl MiniBatchSampler {
    pub fn new(n: usize, batch_size: usize, rng: RandomSource) -> Self {
        assert!(n >= 1 && batch_size >= 1);
        Self {
            n,
            batch_size,
            rng,
            perm: (0..n).collect(),
            cursor: n, // forces a shuffle on the first draw
        }
    }

    pub fn next_batch(&mut self) -> Vec<usize> {
        if self.cursor >= self.n {
            // Fisher-Yates; modulo bias is irrelevant at these sizes.
            for i in (1..self.n).rev() {
                let j = (self.rng.next_u64() % (i as u64 + 1)) as usize;
                self.perm.swap(i, j);
            }
            self.cursor = 0;
        }
        let end = (self.cursor + self.batch_size).min(self.n);
        let batch = self.perm[self.cursor..end].to_vec();
        self.cursor = end;
        batch
    }
}

/// A benchmark objective: quadratic or logistic.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Quadratic(QuadraticProblem),
    Logistic(LogisticProblem),
}

impl Problem {
    pub fn dim(&self) -> usize {
        match self {
            Problem::Quadratic(p) => p.dim(),
            Problem::Logistic(p) => p.dim(),
        }
    }

    /// Number of samples for mini-batch purposes (quadratics have none).
    pub fn n_samples(&self) -> Option<usize> {
        match self {
            Problem::Quadratic(_) => None,
            Problem::Logistic(p) => Some(p.n()),
        }
    }

    pub fn loss(&self, w: &DenseVector) -> f64 {
        match self {
            Problem::Quadratic(p) => p.loss(w),
            Problem::Logistic(p) => logistic_loss(p, w),
        }
    }

    /// Noise-free full gradient (diagnostics and finite-difference checks).
    pub fn full_gradient(&self, w: &DenseVector) -> DenseVector {
        match self {
            Problem::Quadratic(p) => p.exact_gradient(w),
            Problem::Logistic(p) => {
                let all: Vec<usize> = (0..p.n()).collect();
                logistic_minibatch_gradient(p, w, &all).expect("full batch is in range")
            }
        }
    }

    /// Reference point for error norms: `x*` (quadratic) or `w*` (logistic).
    pub fn reference_point(&self) -> &DenseVector {
        match self {
            Problem::Quadratic(p) => &p.x_star,
            Problem::Logistic(p) => &p.w_star,
        }
    }

    /// Reference objective value at the reference point.
    pub fn reference_loss(&self) -> f64 {
        match self {
            Problem::Quadratic(p) => p.f_star,
            Problem::Logistic(p) => logistic_loss(p, &p.w_star),
        }
    }

    pub fn jacobi_scaling(&self) -> DenseVector {
        match self {
            Problem::Quadratic(p) => p.jacobi_scaling(),
            Problem::Logistic(p) => jacobi_preconditioner(p),
        }
    }
}

// ---------------------------------------------------------------------------
// Regression-fixture dumps
// ---------------------------------------------------------------------------
//
// Line-oriented text format, exact to the bit. Layout:
//
//   ska-problem-dump v1
//   family quadratic|logistic
//   <integer fields>            e.g. "d 100" / "n 2000"
//   <scalar fields>  name + f64 as 16 hex digits of the IEEE-754 bits
//   <array fields>   name + all entries hex-encoded, column-major,
//                    space-separated on one line
//
// Field order is fixed: quadratic = d, kappa, noise_sigma, f_star, H, b,
// x_star; logistic = n, d, kappa, lambda_reg, X, y, w_star.

fn hex(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

fn parse_hex(tok: &str) -> Result<f64> {
    u64::from_str_radix(tok, 16)
        .map(f64::from_bits)
        .map_err(|e| Error::BadDump(format!("bad float token {tok:?}: {e}")))
}

fn push_array(out: &mut String, name: &str, data: &[f64]) {
    out.push_str(name);
    for x in data {
        out.push(' ');
        out.push_str(&hex(*x));
    }
    out.push('\n');
}

pub fn dump_problem(p: &Problem) -> String {
    let mut out = String::from("ska-problem-dump v1\n");
    match p {
        Problem::Quadratic(q) => {
            out.push_str("family quadratic\n");
            out.push_str(&format!("d {}\n", q.dim()));
            out.push_str(&format!("kappa {}\n", hex(q.kappa)));
            out.push_str(&format!("noise_sigma {}\n", hex(q.noise_sigma)));
            out.push_str(&format!("f_star {}\n", hex(q.f_star)));
            push_array(&mut out, "H", q.h.as_slice());
            push_array(&mut out, "b", q.b.as_slice());
            push_array(&mut out, "x_star", q.x_star.as_slice());
        }
        Problem::Logistic(l) => {
            out.push_str("family logistic\n");
            out.push_str(&format!("n {}\n", l.n()));
            out.push_str(&format!("d {}\n", l.dim()));
            out.push_str(&format!("kappa {}\n", hex(l.kappa)));
            out.push_str(&format!("lambda_reg {}\n", hex(l.lambda_reg)));
            push_array(&mut out, "X", l.x.as_slice());
            push_array(&mut out, "y", l.y.as_slice());
            push_array(&mut out, "w_star", l.w_star.as_slice());
        }
    }
    out
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "ska-problem-dump v1" {
        return Err(Error::BadDump(format!("unknown header {header:?}")));
    }
    let mut fields: Vec<(String, Vec<String>)> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_ascii_whitespace().map(str::to_owned);
        let name = toks
            .next()
            .ok_or_else(|| Error::BadDump("empty line".into()))?;
        fields.push((name, toks.collect()));
    }
    let scalar = |name: &str| -> Result<f64> {
        fields
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| v.first())
            .ok_or_else(|| Error::BadDump(format!("missing field {name}")))
            .and_then(|t| parse_hex(t))
    };
    let integer = |name: &str| -> Result<usize> {
        fields
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| v.first())
            .ok_or_else(|| Error::BadDump(format!("missing field {name}")))
            .and_then(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::BadDump(format!("bad integer {t:?}: {e}")))
            })
    };
    let array = |name: &str, len: usize| -> Result<Vec<f64>> {
        let toks = &fields
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::BadDump(format!("missing field {name}")))?
            .1;
        if toks.len() != len {
            return Err(Error::BadDump(format!(
                "field {name}: expected {len} entries, found {}",
                toks.len()
            )));
        }
        toks.iter().map(|t| parse_hex(t)).collect()
    };
    let matrix = |name: &str, rows: usize, cols: usize| -> Result<DenseMatrix> {
        let data = array(name, rows * cols)?;
        let mut m = DenseMatrix::zeros(rows, cols);
        for j in 0..cols {
            m.col_mut(j).copy_from_slice(&data[j * rows..(j + 1) * rows]);
        }
        Ok(m)
    };
    let family = fields
        .iter()
        .find(|(n, _)| n == "family")
        .and_then(|(_, v)| v.first().cloned())
        .ok_or_else(|| Error::BadDump("missing family".into()))?;
    match family.as_str() {
        "quadratic" => {
            let d = integer("d")?;
            Ok(Problem::Quadratic(QuadraticProblem {
                h: matrix("H", d, d)?,
                b: DenseVector::from_vec(array("b", d)?),
                x_star: DenseVector::from_vec(array("x_star", d)?),
                f_star: scalar("f_star")?,
                kappa: scalar("kappa")?,
                noise_sigma: scalar("noise_sigma")?,
            }))
        }
        "logistic" => {
            let n = integer("n")?;
            let d = integer("d")?;
            Ok(Problem::Logistic(LogisticProblem {
                x: matrix("X", n, d)?,
                y: DenseVector::from_vec(array("y", n)?),
                w_star: DenseVector::from_vec(array("w_star", d)?),
                lambda_reg: scalar("lambda_reg")?,
                kappa: scalar("kappa")?,
            }))
        }
        other => Err(Error::BadDump(format!("unknown family {other:?}"))),
    }
}
