//! Step rules and run loops.
//!
//! Baselines: SGD, Nesterov momentum (lookahead gradient), Adam with bias
//! correction. The Krylov-projected step composes, in order: mini-batch
//! gradient, optional Jacobi scaling, basis columns from the gradient
//! history or same-batch perturbations, optional Chebyshev transform with
//! QR, the streaming Gauss-Seidel coefficient solve, and an SGD or
//! momentum update along the projected direction.

use crate::basis::{
    chebyshev_basis, monomial_basis, perturbation_columns, BasisKind, BasisSource,
    ChebyshevParams, GradientBuffer, KrylovBasis,
};
use crate::error::{Error, Result};
use crate::gram::{streaming_gauss_seidel, GramSolveConfig, GramSolveResult};
use crate::numerics::{gaussian_vector, norm2, DenseVector, RandomSource};
use crate::problems::{logistic_minibatch_gradient, Problem};

/// Which update rule a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Nesterov,
    Adam,
    Ska,
}

/// Hyperparameters for every optimizer variant. Unused fields are ignored
/// by the simpler rules.
#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub eta: f64,
    /// Momentum coefficient (Nesterov / SKA momentum / Adam β₁).
    pub beta: f64,
    /// Adam second-moment decay.
    pub beta2: f64,
    pub eps_adam: f64,
    pub batch_size: usize,
    /// Krylov dimension.
    pub s: usize,
    pub m_sweeps: usize,
    pub gram_reg: f64,
    pub cheb: ChebyshevParams,
    pub basis_source: BasisSource,
    pub basis_kind: BasisKind,
    pub use_nesterov: bool,
    pub use_jacobi: bool,
    pub delta_perturb: f64,
    /// Evaluate the SKA gradient at `w + βv` instead of `w`. Off by
    /// default: the published composition takes the gradient at `w` and
    /// applies momentum to the projected direction.
    pub nesterov_lookahead: bool,
    pub verbatim_sweeps: bool,
}

impl OptConfig {
    /// SGD defaults: η = 0.1.
    pub fn sgd() -> Self {
        Self {
            eta: 0.1,
            beta: 0.0,
            beta2: 0.999,
            eps_adam: 1e-8,
            batch_size: 64,
            s: 1,
            m_sweeps: 1,
            gram_reg: 0.0,
            cheb: ChebyshevParams::default(),
            basis_source: BasisSource::History,
            basis_kind: BasisKind::Monomial,
            use_nesterov: false,
            use_jacobi: false,
            delta_perturb: 1e-6,
            nesterov_lookahead: false,
            verbatim_sweeps: false,
        }
    }

    /// Nesterov momentum defaults: η = 0.1, β = 0.9.
    pub fn nesterov() -> Self {
        Self {
            beta: 0.9,
            ..Self::sgd()
        }
    }

    /// Adam defaults: η = 0.001, β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
    pub fn adam() -> Self {
        Self {
            eta: 0.001,
            beta: 0.9,
            ..Self::sgd()
        }
    }

    /// Basic SKA-SGD: monomial history basis, s = 16, m = 2 sweeps,
    /// Gram regularization 1e-4, batch 32.
    pub fn ska_basic() -> Self {
        Self {
            eta: 0.1,
            batch_size: 32,
            s: 16,
            m_sweeps: 2,
            gram_reg: 1e-4,
            ..Self::sgd()
        }
    }

    /// SKA-SGD with the Chebyshev basis on [0.01, 10].
    pub fn ska_chebyshev() -> Self {
        Self {
            basis_kind: BasisKind::Chebyshev,
            ..Self::ska_basic()
        }
    }

    /// Chebyshev basis plus Nesterov momentum (β = 0.9).
    pub fn ska_chebyshev_nesterov() -> Self {
        Self {
            use_nesterov: true,
            beta: 0.9,
            ..Self::ska_chebyshev()
        }
    }

    /// The full composition: Chebyshev basis, streaming Gauss-Seidel,
    /// Nesterov momentum, and Jacobi preconditioning.
    pub fn ska_ultimate() -> Self {
        Self {
            use_jacobi: true,
            ..Self::ska_chebyshev_nesterov()
        }
    }
}

/// Mutable per-trial optimizer state.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub w: DenseVector,
    pub v: DenseVector,
    pub adam_m: DenseVector,
    pub adam_v: DenseVector,
    /// Step counter; increments by exactly one per accepted step.
    pub t: usize,
    pub buf: GradientBuffer,
    /// Jacobi scaling, computed once per run when enabled.
    pub d_inv: Option<DenseVector>,
}

impl OptimizerState {
    pub fn new(problem: &Problem, cfg: &OptConfig, w0: DenseVector) -> Self {
        let dim = problem.dim();
        assert_eq!(w0.len(), dim);
        let d_inv = cfg.use_jacobi.then(|| problem.jacobi_scaling());
        Self {
            w: w0,
            v: DenseVector::zeros(dim),
            adam_m: DenseVector::zeros(dim),
            adam_v: DenseVector::zeros(dim),
            t: 0,
            buf: GradientBuffer::new(dim, cfg.s.clamp(1, dim)),
            d_inv,
        }
    }
}

/// Per-checkpoint metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub iter: usize,
    pub loss: f64,
    pub grad_norm: f64,
    /// ‖x_k − x*‖ against the problem's reference point.
    pub err_norm: f64,
    /// |f(x_k) − f*| against the reference objective.
    pub obj_gap: f64,
    pub wall_ns: u64,
}

/// One optimizer trial: checkpoint trace plus outcome flags.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub optimizer: String,
    pub seed: u64,
    pub records: Vec<StepRecord>,
    pub diverged: bool,
    pub total_wall_ns: u64,
}

/// What a single step reports back.
#[derive(Debug, Clone)]
pub struct StepInfo {
    /// Norm of the raw stochastic gradient at the evaluation point.
    pub grad_norm: f64,
    /// Gram solve diagnostics (SKA steps only).
    pub solve: Option<GramSolveResult>,
}

/// Stochastic gradient oracle for one iteration: a quadratic freezes its
/// noise draw, a logistic run freezes its mini-batch, so repeated
/// evaluations within the step see the same randomness.
pub struct StepOracle<'a> {
    problem: &'a Problem,
    batch: &'a [usize],
    frozen_noise: Option<DenseVector>,
}

impl<'a> StepOracle<'a> {
    pub fn new(problem: &'a Problem, batch: &'a [usize], rng: &mut RandomSource) -> Self {
        let frozen_noise = match problem {
            Problem::Quadratic(q) if q.noise_sigma != 0.0 => {
                let mut eps = gaussian_vector(q.dim(), rng);
                eps.scale(q.noise_sigma);
                Some(eps)
            }
            _ => None,
        };
        Self {
            problem,
            batch,
            frozen_noise,
        }
    }

    pub fn eval(&self, x: &DenseVector) -> Result<DenseVector> {
        match self.problem {
            Problem::Quadratic(q) => {
                let mut g = q.exact_gradient(x);
                if let Some(eps) = &self.frozen_noise {
                    g.add_scaled(1.0, eps);
                }
                Ok(g)
            }
            Problem::Logistic(l) => logistic_minibatch_gradient(l, x, self.batch),
        }
    }
}

fn check_finite(g: &DenseVector, iter: usize) -> Result<()> {
    if g.all_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteGradient(iter))
    }
}

/// `w ← w − η g` on one stochastic gradient (Jacobi-scaled when enabled).
pub fn sgd_step(
    state: &mut OptimizerState,
    problem: &Problem,
    batch: &[usize],
    cfg: &OptConfig,
    rng: &mut RandomSource,
) -> Result<StepInfo> {
    let oracle = StepOracle::new(problem, batch, rng);
    let mut g = oracle.eval(&state.w)?;
    check_finite(&g, state.t)?;
    let grad_norm = g.norm2();
    if let Some(d_inv) = &state.d_inv {
        g.hadamard(d_inv);
    }
    state.w.add_scaled(-cfg.eta, &g);
    state.t += 1;
    Ok(StepInfo {
        grad_norm,
        solve: None,
    })
}

/// Nesterov momentum with the gradient at the lookahead point:
/// `v ← βv − η ∇f(w + βv)`, `w ← w + v`.
pub fn nesterov_step(
    state: &mut OptimizerState,
    problem: &Problem,
    batch: &[usize],
    cfg: &OptConfig,
    rng: &mut RandomSource,
) -> Result<StepInfo> {
    let oracle = StepOracle::new(problem, batch, rng);
    let mut look = state.w.clone();
    look.add_scaled(cfg.beta, &state.v);
    let mut g = oracle.eval(&look)?;
    check_finite(&g, state.t)?;
    let grad_norm = g.norm2();
    if let Some(d_inv) = &state.d_inv {
        g.hadamard(d_inv);
    }
    state.v.scale(cfg.beta);
    state.v.add_scaled(-cfg.eta, &g);
    state.w.add_scaled(1.0, &state.v);
    state.t += 1;
    Ok(StepInfo {
        grad_norm,
        solve: None,
    })
}

/// Adam with bias correction.
pub fn adam_step(
    state: &mut OptimizerState,
    problem: &Problem,
    batch: &[usize],
    cfg: &OptConfig,
    rng: &mut RandomSource,
) -> Result<StepInfo> {
    let oracle = StepOracle::new(problem, batch, rng);
    let g = oracle.eval(&state.w)?;
    check_finite(&g, state.t)?;
    let grad_norm = g.norm2();
    state.t += 1;
    let t = state.t as i32;
    let (b1, b2) = (cfg.beta, cfg.beta2);
    let m_corr = 1.0 - b1.powi(t);
    let v_corr = 1.0 - b2.powi(t);
    for i in 0..g.len() {
        let gi = g[i];
        state.adam_m[i] = b1 * state.adam_m[i] + (1.0 - b1) * gi;
        state.adam_v[i] = b2 * state.adam_v[i] + (1.0 - b2) * gi * gi;
        let m_hat = state.adam_m[i] / m_corr;
        let v_hat = state.adam_v[i] / v_corr;
        state.w[i] -= cfg.eta * m_hat / (v_hat.sqrt() + cfg.eps_adam);
    }
    Ok(StepInfo {
        grad_norm,
        solve: None,
    })
}

/// One SKA-SGD step. Returns the Gram solve diagnostics.
pub fn ska_step(
    state: &mut OptimizerState,
    problem: &Problem,
    batch: &[usize],
    cfg: &OptConfig,
    rng: &mut RandomSource,
) -> Result<StepInfo> {
    let oracle = StepOracle::new(problem, batch, rng);
    let eval_point = if cfg.use_nesterov && cfg.nesterov_lookahead {
        let mut look = state.w.clone();
        look.add_scaled(cfg.beta, &state.v);
        look
    } else {
        state.w.clone()
    };
    let mut g = oracle.eval(&eval_point)?;
    check_finite(&g, state.t)?;
    let grad_norm = g.norm2();
    if let Some(d_inv) = &state.d_inv {
        g.hadamard(d_inv);
    }

    let mut cols = match cfg.basis_source {
        BasisSource::History => {
            state.buf.push(g.clone())?;
            state.buf.as_matrix()
        }
        BasisSource::Perturbation => perturbation_columns(
            |x| oracle.eval(x),
            &eval_point,
            &g,
            cfg.s.clamp(1, state.w.len()),
            cfg.delta_perturb,
            state.d_inv.as_ref(),
        )?,
    };
    // Vanished columns get a seeded random unit replacement so late-stage
    // underflow cannot abort a run.
    for j in 0..cols.cols() {
        if norm2(cols.col(j)) < 1e-300 {
            let mut sub = gaussian_vector(cols.rows(), rng);
            let n = sub.norm2();
            sub.scale(1.0 / n);
            cols.col_mut(j).copy_from_slice(sub.as_slice());
        }
    }

    let s_eff = cols.cols();
    let basis: KrylovBasis = match cfg.basis_kind {
        BasisKind::Chebyshev => {
            match chebyshev_basis(&cols, s_eff, &cfg.cheb, cfg.basis_source) {
                Ok(b) => b,
                // Recurrence cancellation: fall back to the monomial basis.
                Err(Error::ZeroVector(_)) => monomial_basis(&cols, cfg.basis_source)?,
                Err(e) => return Err(e),
            }
        }
        BasisKind::Monomial => monomial_basis(&cols, cfg.basis_source)?,
    };

    let solve_cfg = GramSolveConfig {
        lambda_reg: cfg.gram_reg,
        sweeps: cfg.m_sweeps,
        verbatim_sweeps: cfg.verbatim_sweeps,
    };
    let solve = streaming_gauss_seidel(&basis.z, &g, &solve_cfg)?;
    let pg = basis.z.matvec(&solve.alpha);

    if cfg.use_nesterov {
        state.v.scale(cfg.beta);
        state.v.add_scaled(-cfg.eta, &pg);
        state.w.add_scaled(1.0, &state.v);
    } else {
        state.w.add_scaled(-cfg.eta, &pg);
    }
    state.t += 1;
    Ok(StepInfo {
        grad_norm,
        solve: Some(solve),
    })
}

pub fn apply_step(
    kind: OptimizerKind,
    state: &mut OptimizerState,
    problem: &Problem,
    batch: &[usize],
    cfg: &OptConfig,
    rng: &mut RandomSource,
) -> Result<StepInfo> {
    match kind {
        OptimizerKind::Sgd => sgd_step(state, problem, batch, cfg, rng),
        OptimizerKind::Nesterov => nesterov_step(state, problem, batch, cfg, rng),
        OptimizerKind::Adam => adam_step(state, problem, batch, cfg, rng),
        OptimizerKind::Ska => ska_step(state, problem, batch, cfg, rng),
    }
}

/// Loss ceiling past which a trial counts as diverged.
pub const DIVERGENCE_LOSS_LIMIT: f64 = 1e12;

/// Run `iterations` steps, recording a [`StepRecord`] at every
/// `checkpoint_every`-th iteration and at the final one.
///
/// Starting point: quadratics start at a seeded random point at unit
/// distance from `x*`; logistic runs start at `w = 0`. Randomness is
/// consumed in this order: the quadratic start direction, then the
/// mini-batch sampler stream (forked), then per-step noise.
pub fn run(
    problem: &Problem,
    kind: OptimizerKind,
    cfg: &OptConfig,
    iterations: usize,
    checkpoint_every: usize,
    mut rng: RandomSource,
    optimizer_name: &str,
) -> TrialRecord {
    assert!(iterations >= 1 && checkpoint_every >= 1);
    let seed = rng.seed();
    let dim = problem.dim();
    let w0 = match problem {
        Problem::Quadratic(q) => {
            let mut u = gaussian_vector(dim, &mut rng);
            let n = u.norm2();
            u.scale(1.0 / n);
            let mut w = q.x_star.clone();
            w.add_scaled(1.0, &u);
            w
        }
        Problem::Logistic(_) => DenseVector::zeros(dim),
    };
    let mut sampler = problem
        .n_samples()
        .map(|n| crate::problems::MiniBatchSampler::new(n, cfg.batch_size.max(1), rng.fork()));

    let mut state = OptimizerState::new(problem, cfg, w0);
    let mut records = Vec::new();
    let mut diverged = false;
    let start = std::time::Instant::now();
    let mut last_grad_norm: Option<f64> = None;

    for k in 1..=iterations {
        let batch = match &mut sampler {
            Some(s) => s.next_batch(),
            None => Vec::new(),
        };
        match apply_step(kind, &mut state, problem, &batch, cfg, &mut rng) {
            Ok(info) => last_grad_norm = Some(info.grad_norm),
            Err(_) => {
                diverged = true;
                break;
            }
        }
        if !state.w.all_finite() {
            diverged = true;
            break;
        }
        if k % checkpoint_every == 0 || k == iterations {
            let loss = problem.loss(&state.w);
            if !loss.is_finite() || loss > DIVERGENCE_LOSS_LIMIT {
                diverged = true;
                break;
            }
            let mut err = state.w.clone();
            err.add_scaled(-1.0, problem.reference_point());
            records.push(StepRecord {
                iter: k,
                loss,
                grad_norm: last_grad_norm.unwrap_or(f64::NAN),
                err_norm: err.norm2(),
                obj_gap: (loss - problem.reference_loss()).abs(),
                wall_ns: start.elapsed().as_nanos() as u64,
            });
        }
    }
    TrialRecord {
        optimizer: optimizer_name.to_string(),
        seed,
        records,
        diverged,
        total_wall_ns: start.elapsed().as_nanos() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DenseMatrix;
    use crate::problems::{gen_logistic, gen_quadratic, QuadraticProblem};

    fn scalar_quadratic(hval: f64, bval: f64) -> Problem {
        // 2-dim because DenseMatrix insists on d ≥ 1 and gen paths on d ≥ 2;
        // second coordinate is decoupled with H₂₂ = 1, b₂ = 0.
        let mut h = DenseMatrix::zeros(2, 2);
        h[(0, 0)] = hval;
        h[(1, 1)] = 1.0;
        let b = DenseVector::from_slice(&[bval, 0.0]);
        let x_star = DenseVector::from_slice(&[bval / hval, 0.0]);
        let mut q = QuadraticProblem {
            h,
            b,
            x_star,
            f_star: 0.0,
            kappa: hval.max(1.0),
            noise_sigma: 0.0,
        };
        q.f_star = q.loss(&q.x_star);
        Problem::Quadratic(q)
    }

    #[test]
    fn sgd_scalar_arithmetic() {
        // H = (2), b = 0, w = 1, η = 0.1: w' = 1 − 0.1·2 = 0.8
        let p = scalar_quadratic(2.0, 0.0);
        let cfg = OptConfig::sgd();
        let mut state = OptimizerState::new(&p, &cfg, DenseVector::from_slice(&[1.0, 0.0]));
        sgd_step(&mut state, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
        assert!((state.w[0] - 0.8).abs() < 1e-15);
        assert_eq!(state.t, 1);
    }

    #[test]
    fn sgd_fixed_point_at_zero_gradient() {
        let p = scalar_quadratic(2.0, 0.0);
        let cfg = OptConfig::sgd();
        let mut state = OptimizerState::new(&p, &cfg, DenseVector::zeros(2));
        for _ in 0..5 {
            sgd_step(&mut state, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
        }
        assert_eq!(state.w.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn sgd_two_steps_match_linear_iteration_closed_form() {
        let mut rng = RandomSource::new(70);
        let p = Problem::Quadratic(gen_quadratic(6, 50.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig::sgd();
        let w0 = gaussian_vector(6, &mut rng);
        let mut state = OptimizerState::new(&p, &cfg, w0.clone());
        for _ in 0..2 {
            sgd_step(&mut state, &p, &[], &cfg, &mut rng).unwrap();
        }
        // closed form: w2 = (I − ηH)² w0 + η(I + (I − ηH)) b... expand via
        // direct replay with explicit matvecs.
        let (h, b) = match &p {
            Problem::Quadratic(q) => (&q.h, &q.b),
            _ => unreachable!(),
        };
        let step = |w: &DenseVector| {
            let mut g = h.matvec(w);
            g.add_scaled(-1.0, b);
            let mut out = w.clone();
            out.add_scaled(-0.1, &g);
            out
        };
        let expect = step(&step(&w0));
        for i in 0..6 {
            assert!((state.w[i] - expect[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn nesterov_first_step_with_zero_velocity_is_sgd() {
        let mut rng = RandomSource::new(71);
        let p = Problem::Quadratic(gen_quadratic(5, 30.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig::nesterov();
        let w0 = gaussian_vector(5, &mut rng);
        let mut nes = OptimizerState::new(&p, &cfg, w0.clone());
        let mut sgd = OptimizerState::new(&p, &cfg, w0);
        nesterov_step(&mut nes, &p, &[], &cfg, &mut RandomSource::new(1)).unwrap();
        sgd_step(&mut sgd, &p, &[], &cfg, &mut RandomSource::new(1)).unwrap();
        for i in 0..5 {
            assert!((nes.w[i] - sgd.w[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn nesterov_with_zero_beta_reduces_to_sgd_forever() {
        let mut rng = RandomSource::new(72);
        let p = Problem::Quadratic(gen_quadratic(5, 30.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig {
            beta: 0.0,
            ..OptConfig::nesterov()
        };
        let w0 = gaussian_vector(5, &mut rng);
        let mut nes = OptimizerState::new(&p, &cfg, w0.clone());
        let mut sgd = OptimizerState::new(&p, &cfg, w0);
        for _ in 0..100 {
            nesterov_step(&mut nes, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
            sgd_step(&mut sgd, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
            for i in 0..5 {
                assert!((nes.w[i] - sgd.w[i]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn nesterov_five_steps_match_recurrence_replay() {
        let mut rng = RandomSource::new(73);
        let p = Problem::Quadratic(gen_quadratic(2, 10.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig::nesterov();
        let w0 = gaussian_vector(2, &mut rng);
        let mut state = OptimizerState::new(&p, &cfg, w0.clone());
        for _ in 0..5 {
            nesterov_step(&mut state, &p, &[], &cfg, &mut rng).unwrap();
        }
        // hand-rolled replay
        let (h, b) = match &p {
            Problem::Quadratic(q) => (&q.h, &q.b),
            _ => unreachable!(),
        };
        let mut w = w0;
        let mut v = DenseVector::zeros(2);
        for _ in 0..5 {
            let mut look = w.clone();
            look.add_scaled(0.9, &v);
            let mut g = h.matvec(&look);
            g.add_scaled(-1.0, b);
            v.scale(0.9);
            v.add_scaled(-0.1, &g);
            w.add_scaled(1.0, &v);
        }
        for i in 0..2 {
            assert!((state.w[i] - w[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn adam_first_step_magnitude_is_learning_rate() {
        let mut rng = RandomSource::new(74);
        let p = Problem::Quadratic(gen_quadratic(5, 100.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig::adam();
        let w0 = gaussian_vector(5, &mut rng);
        let mut state = OptimizerState::new(&p, &cfg, w0.clone());
        let g = p.full_gradient(&w0);
        adam_step(&mut state, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
        for i in 0..5 {
            if g[i].abs() > 1e-4 {
                let dw = (state.w[i] - w0[i]).abs();
                assert!(
                    dw >= 0.99 * cfg.eta && dw <= cfg.eta,
                    "coordinate {i}: |Δw| = {dw}"
                );
            }
        }
    }

    #[test]
    fn adam_stays_put_on_zero_gradient() {
        let p = scalar_quadratic(2.0, 0.0);
        let cfg = OptConfig::adam();
        let mut state = OptimizerState::new(&p, &cfg, DenseVector::zeros(2));
        for _ in 0..10 {
            adam_step(&mut state, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
        }
        assert_eq!(state.w.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn adam_matches_scalar_reference_recurrence() {
        // Fixed gradient stream on a frozen point: replay the textbook
        // recurrence per coordinate.
        let p = scalar_quadratic(1.0, -3.0); // constant gradient 3 at w = 0
        let cfg = OptConfig::adam();
        let mut state = OptimizerState::new(&p, &cfg, DenseVector::zeros(2));
        // keep w pinned so the gradient stays constant
        let mut reference_w = 0.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for t in 1..=10 {
            let g = 1.0 * reference_w + 3.0; // H w − b on coordinate 0
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            let m_hat = m / (1.0 - 0.9f64.powi(t));
            let v_hat = v / (1.0 - 0.999f64.powi(t));
            reference_w -= 0.001 * m_hat / (v_hat.sqrt() + 1e-8);
            adam_step(&mut state, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
            assert!(
                (state.w[0] - reference_w).abs() <= 1e-14,
                "t = {t}: {} vs {reference_w}",
                state.w[0]
            );
        }
    }

    #[test]
    fn ska_single_monomial_column_reduces_to_sgd() {
        let mut rng = RandomSource::new(75);
        let p = Problem::Quadratic(gen_quadratic(8, 100.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig {
            s: 1,
            gram_reg: 0.0,
            m_sweeps: 1,
            ..OptConfig::ska_basic()
        };
        let sgd_cfg = OptConfig {
            eta: cfg.eta,
            ..OptConfig::sgd()
        };
        let w0 = gaussian_vector(8, &mut rng);
        let mut a = OptimizerState::new(&p, &cfg, w0.clone());
        let mut b = OptimizerState::new(&p, &sgd_cfg, w0);
        for step in 0..100 {
            ska_step(&mut a, &p, &[], &cfg, &mut RandomSource::new(0)).unwrap();
            sgd_step(&mut b, &p, &[], &sgd_cfg, &mut RandomSource::new(0)).unwrap();
            for i in 0..8 {
                let scale = b.w[i].abs().max(1.0);
                assert!(
                    (a.w[i] - b.w[i]).abs() <= 1e-14 * scale,
                    "step {step} coordinate {i}: {} vs {}",
                    a.w[i],
                    b.w[i]
                );
            }
        }
    }

    #[test]
    fn ska_projection_never_grows_the_gradient() {
        // Orthonormalized basis, λ = 0: pg = ZZᵀg, so ‖pg‖ ≤ ‖g‖.
        let mut rng = RandomSource::new(76);
        let p = Problem::Quadratic(gen_quadratic(20, 1e4, 1.0, &mut rng).unwrap());
        let cfg = OptConfig {
            gram_reg: 0.0,
            s: 6,
            ..OptConfig::ska_chebyshev()
        };
        let w0 = gaussian_vector(20, &mut rng);
        let mut state = OptimizerState::new(&p, &cfg, w0);
        for _ in 0..20 {
            let before = state.w.clone();
            let info = ska_step(&mut state, &p, &[], &cfg, &mut rng).unwrap();
            let solve = info.solve.unwrap();
            let _ = solve;
            // reconstruct pg from the positions
            let mut pg = before.clone();
            pg.add_scaled(-1.0, &state.w);
            pg.scale(1.0 / cfg.eta);
            let g_norm = info.grad_norm;
            assert!(
                pg.norm2() <= g_norm * (1.0 + 1e-10),
                "‖pg‖ = {} > ‖g‖ = {}",
                pg.norm2(),
                g_norm
            );
        }
    }

    #[test]
    fn ska_history_warmup_uses_partial_buffer() {
        let mut rng = RandomSource::new(77);
        let p = Problem::Quadratic(gen_quadratic(10, 100.0, 0.5, &mut rng).unwrap());
        let cfg = OptConfig {
            s: 4,
            ..OptConfig::ska_basic()
        };
        let w0 = gaussian_vector(10, &mut rng);
        let mut state = OptimizerState::new(&p, &cfg, w0);
        for k in 1..=6 {
            ska_step(&mut state, &p, &[], &cfg, &mut rng).unwrap();
            assert_eq!(state.buf.fill(), k.min(4));
        }
    }

    #[test]
    fn ska_perturbation_on_logistic_runs() {
        let mut rng = RandomSource::new(78);
        let p = Problem::Logistic(gen_logistic(80, 6, 100.0, 0.1, 0.1, &mut rng).unwrap());
        let cfg = OptConfig {
            s: 4,
            basis_source: BasisSource::Perturbation,
            ..OptConfig::ska_ultimate()
        };
        let mut state = OptimizerState::new(&p, &cfg, DenseVector::zeros(6));
        let batch: Vec<usize> = (0..16).collect();
        for _ in 0..5 {
            let info = ska_step(&mut state, &p, &batch, &cfg, &mut rng).unwrap();
            assert!(info.solve.is_some());
            assert!(state.w.all_finite());
        }
        assert_eq!(state.t, 5);
    }

    #[test]
    fn run_records_single_checkpoint_when_period_equals_length() {
        let mut rng = RandomSource::new(79);
        let p = Problem::Quadratic(gen_quadratic(6, 10.0, 0.0, &mut rng).unwrap());
        let rec = run(
            &p,
            OptimizerKind::Sgd,
            &OptConfig::sgd(),
            10,
            10,
            RandomSource::new(80),
            "sgd",
        );
        assert_eq!(rec.records.len(), 1);
        assert_eq!(rec.records[0].iter, 10);
        assert!(!rec.diverged);
    }

    #[test]
    fn run_is_bitwise_deterministic() {
        let mut rng = RandomSource::new(81);
        let p = Problem::Quadratic(gen_quadratic(8, 100.0, 0.7, &mut rng).unwrap());
        let cfg = OptConfig::ska_chebyshev();
        let a = run(&p, OptimizerKind::Ska, &cfg, 25, 5, RandomSource::new(9), "ska");
        let b = run(&p, OptimizerKind::Ska, &cfg, 25, 5, RandomSource::new(9), "ska");
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            assert_eq!(ra.err_norm.to_bits(), rb.err_norm.to_bits());
            assert_eq!(ra.obj_gap.to_bits(), rb.obj_gap.to_bits());
            assert_eq!(ra.grad_norm.to_bits(), rb.grad_norm.to_bits());
        }
    }

    #[test]
    fn logistic_run_starts_near_ln2() {
        let mut rng = RandomSource::new(82);
        let p = Problem::Logistic(gen_logistic(200, 10, 1e4, 0.1, 0.1, &mut rng).unwrap());
        let rec = run(
            &p,
            OptimizerKind::Sgd,
            &OptConfig {
                batch_size: 16,
                eta: 1e-3,
                ..OptConfig::sgd()
            },
            20,
            1,
            RandomSource::new(83),
            "sgd",
        );
        // ill-conditioned: loss sits at the w = 0 value ln 2 early on
        assert!((rec.records[0].loss - std::f64::consts::LN_2).abs() < 1e-3);
    }

    #[test]
    fn divergence_is_flagged_not_crashed() {
        let mut rng = RandomSource::new(84);
        let p = Problem::Quadratic(gen_quadratic(6, 1e6, 0.0, &mut rng).unwrap());
        // η = 0.1 against λ_max = 1e6 explodes immediately
        let rec = run(
            &p,
            OptimizerKind::Sgd,
            &OptConfig::sgd(),
            50,
            10,
            RandomSource::new(85),
            "sgd",
        );
        assert!(rec.diverged);
    }

    #[test]
    fn noiseless_ska_error_is_monotone_after_warmup() {
        // Strongly convex quadratic, η ≤ 1/L, no noise: err_norm must be
        // non-increasing once the buffer is full.
        let mut rng = RandomSource::new(86);
        let p = Problem::Quadratic(gen_quadratic(12, 100.0, 0.0, &mut rng).unwrap());
        let cfg = OptConfig {
            eta: 0.009, // 1/L with L = 100, with margin
            s: 4,
            ..OptConfig::ska_chebyshev()
        };
        let rec = run(
            &p,
            OptimizerKind::Ska,
            &cfg,
            60,
            1,
            RandomSource::new(87),
            "ska",
        );
        assert!(!rec.diverged);
        for pair in rec.records.windows(2) {
            if pair[0].iter >= 4 {
                assert!(
                    pair[1].err_norm <= pair[0].err_norm + 1e-12,
                    "err_norm rose from {} to {} at iter {}",
                    pair[0].err_norm,
                    pair[1].err_norm,
                    pair[1].iter
                );
            }
        }
    }
}
