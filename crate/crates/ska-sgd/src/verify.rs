//! Numerical property checks behind the `verify` subcommand.
//!
//! Each check prints one pass/fail line so the solver-level claims
//! (oracle equivalence, backward-error bound, variance-trace reduction,
//! gradient correctness, reduction identities) can be confirmed from the
//! CLI without a test toolchain.

use crate::basis::{
    chebyshev_basis, monomial_basis, perturbation_columns, BasisKind, BasisSource,
    ChebyshevParams,
};
use crate::gram::{
    backward_error_bound, dense_oracle_solve, streaming_gauss_seidel, GramSolveConfig,
};
use crate::numerics::{dot, gaussian_vector, norm2, DenseMatrix, DenseVector, RandomSource};
use crate::optim::{
    nesterov_step, run, sgd_step, ska_step, OptConfig, OptimizerKind, OptimizerState,
};
use crate::oracle;
use crate::problems::{gen_logistic, gen_quadratic, logistic_loss, Problem};

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail,
        }
    }
}

pub fn all_checks() -> Vec<fn() -> CheckReport> {
    vec![
        check_gram_oracle_equivalence,
        check_backward_error_bound,
        check_variance_trace,
        check_gradient_finite_difference,
        check_reduction_identities,
        check_projection_boundedness,
        check_sweep_monotonicity,
        check_subspace_angle,
        check_chebyshev_conditioning,
        check_error_monotonicity,
    ]
}

pub fn run_all() -> Vec<CheckReport> {
    all_checks().into_iter().map(|c| c()).collect()
}

fn correlated_columns(d: usize, s: usize, c: f64, rng: &mut RandomSource) -> DenseMatrix {
    let base = gaussian_vector(d, rng);
    let cols: Vec<DenseVector> = (0..s)
        .map(|_| {
            let mut col = base.clone();
            col.add_scaled(c, &gaussian_vector(d, rng));
            col
        })
        .collect();
    DenseMatrix::from_columns(&cols)
}

fn explicit_gram(p: &DenseMatrix, lambda: f64) -> DenseMatrix {
    let mut g = p.transpose().matmat(p);
    for i in 0..p.cols() {
        g[(i, i)] += lambda;
    }
    g
}

/// Streaming single sweep equals a classical sweep on the explicit Gram
/// matrix to 1e-14; 50 true-GS sweeps agree with the Cholesky oracle to
/// 1e-12 relative on well-conditioned instances.
pub fn check_gram_oracle_equivalence() -> CheckReport {
    const NAME: &str = "gram-oracle-equivalence";
    let mut rng = RandomSource::new(2024);

    // Half 1: the streaming first sweep is the classical forward sweep,
    // entrywise, including badly conditioned bases.
    let mut worst_sweep = 0.0f64;
    for trial in 0..25 {
        let c = 0.05 + 0.2 * (trial % 5) as f64;
        let p = correlated_columns(30, 8, c, &mut rng);
        let g = gaussian_vector(30, &mut rng);
        let single = GramSolveConfig {
            lambda_reg: 1e-4,
            sweeps: 1,
            verbatim_sweeps: false,
        };
        let streamed = streaming_gauss_seidel(&p, &g, &single).expect("solve");
        let mut classic = DenseVector::zeros(8);
        oracle::classical_gs_sweep(&p, &g, 1e-4, &mut classic);
        for i in 0..8 {
            worst_sweep = worst_sweep.max((streamed.alpha[i] - classic[i]).abs());
        }
    }

    // Half 2: iterated-to-convergence agreement with the Cholesky oracle
    // on well-conditioned Gram systems. Fifty sweeps converge to 1e-12
    // only while the Gram condition number stays small (measured limit is
    // about 15); bases straight from the Chebyshev construction sit near 1.
    let mut worst_rel = 0.0f64;
    let mut max_kappa = 0.0f64;
    for trial in 0..15 {
        let p = match trial % 3 {
            0 => crate::numerics::gaussian_matrix(40, 6, &mut rng),
            1 => correlated_columns(40, 6, 2.0 + (trial % 5) as f64, &mut rng),
            _ => {
                let raw = correlated_columns(40, 6, 0.3, &mut rng);
                chebyshev_basis(&raw, 6, &ChebyshevParams::default(), BasisSource::History)
                    .expect("basis")
                    .z
            }
        };
        let g = gaussian_vector(40, &mut rng);
        let kappa = oracle::condition_number_sym(&explicit_gram(&p, 1e-4));
        assert!(kappa <= 1e4, "instance family out of its stated regime");
        max_kappa = max_kappa.max(kappa);
        let many = GramSolveConfig {
            lambda_reg: 1e-4,
            sweeps: 50,
            verbatim_sweeps: false,
        };
        let iterated = streaming_gauss_seidel(&p, &g, &many).expect("solve");
        let exact = dense_oracle_solve(&p, &g, 1e-4).expect("oracle");
        let mut diff = iterated.alpha.clone();
        diff.add_scaled(-1.0, &exact);
        worst_rel = worst_rel.max(norm2(diff.as_slice()) / norm2(exact.as_slice()));
    }
    let detail = format!(
        "single-sweep max |Δα| = {worst_sweep:.2e} (limit 1e-14); m=50 vs Cholesky max rel = {worst_rel:.2e} (limit 1e-12, instances up to κ(G) = {max_kappa:.1e})"
    );
    if worst_sweep <= 1e-14 && worst_rel <= 1e-12 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// 100 seeded instances at d = 200, s cycling over {4, 8, 16}: the
/// single-sweep backward error stays below ε·κ(G)·(1 + s(s−1)/2) and
/// below 1e-10 absolute.
pub fn check_backward_error_bound() -> CheckReport {
    const NAME: &str = "backward-error-bound";
    let mut rng = RandomSource::new(4096);
    let mut worst_ratio = 0.0f64;
    let mut worst_abs = 0.0f64;
    for trial in 0..100 {
        let s = [4usize, 8, 16][trial % 3];
        let c = 0.05 + 0.1 * (trial % 7) as f64;
        let raw = correlated_columns(200, s, c, &mut rng);
        let basis = chebyshev_basis(&raw, s, &ChebyshevParams::default(), BasisSource::History)
            .expect("basis");
        let g = gaussian_vector(200, &mut rng);
        let cfg = GramSolveConfig {
            lambda_reg: 1e-4,
            sweeps: 1,
            verbatim_sweeps: false,
        };
        let r = streaming_gauss_seidel(&basis.z, &g, &cfg).expect("solve");
        let kappa = oracle::condition_number_sym(&explicit_gram(&basis.z, 1e-4));
        let bound = backward_error_bound(basis.s_eff(), kappa);
        worst_ratio = worst_ratio.max(r.backward_error / bound);
        worst_abs = worst_abs.max(r.backward_error);
    }
    let detail = format!(
        "100 instances: max backward/bound = {worst_ratio:.3}, max backward = {worst_abs:.2e} (limit 1e-10)"
    );
    if worst_ratio <= 1.0 && worst_abs <= 1e-10 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// Monte Carlo check of the variance-trace inequality
/// `tr Cov(Πg) ≤ tr Cov(g)` at frozen points with frozen bases.
pub fn check_variance_trace() -> CheckReport {
    const NAME: &str = "variance-trace";
    let mut rng = RandomSource::new(31337);
    let d = 50;
    let p = gen_quadratic(d, 1e4, 1.0, &mut rng).expect("problem");
    let n_draws = 5000;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut detail_part = String::new();
    for point in 0..10 {
        let w = gaussian_vector(d, &mut rng);
        let g_mean = p.exact_gradient(&w);
        for (si, &s) in [4usize, 8, 16].iter().enumerate() {
            // frozen basis from noiseless perturbation columns at w
            let cols = perturbation_columns(
                |x| Ok(p.exact_gradient(x)),
                &w,
                &g_mean,
                s,
                1e-6,
                None,
            )
            .expect("columns");
            let z = chebyshev_basis(&cols, s, &ChebyshevParams::default(), BasisSource::Perturbation)
                .expect("basis")
                .z;
            let mut g_sq = 0.0;
            let mut d_sq = 0.0;
            let mut g_sq_sq = 0.0;
            let mut g_sum = DenseVector::zeros(d);
            let mut d_sum = DenseVector::zeros(d);
            let mut g_samples = Vec::with_capacity(n_draws);
            let mut d_samples = Vec::with_capacity(n_draws);
            for _ in 0..n_draws {
                let g = crate::problems::quad_gradient(&p, &w, &mut rng);
                let alpha = dense_oracle_solve(&z, &g, 1e-4).expect("solve");
                let dvec = z.matvec(&alpha);
                g_sum.add_scaled(1.0, &g);
                d_sum.add_scaled(1.0, &dvec);
                g_samples.push(g);
                d_samples.push(dvec);
            }
            g_sum.scale(1.0 / n_draws as f64);
            d_sum.scale(1.0 / n_draws as f64);
            for (g, dv) in g_samples.iter().zip(&d_samples) {
                let mut cg = g.clone();
                cg.add_scaled(-1.0, &g_sum);
                let sq = cg.norm2().powi(2);
                g_sq += sq;
                g_sq_sq += sq * sq;
                let mut cd = dv.clone();
                cd.add_scaled(-1.0, &d_sum);
                d_sq += cd.norm2().powi(2);
            }
            let tr_g = g_sq / n_draws as f64;
            let tr_d = d_sq / n_draws as f64;
            let var_of_sq = g_sq_sq / n_draws as f64 - tr_g * tr_g;
            let se = (var_of_sq / n_draws as f64).sqrt();
            let margin = tr_d - (tr_g + 3.0 * se);
            worst_margin = worst_margin.max(margin);
            if point == 0 && si == 0 {
                detail_part = format!("example: tr Cov(d) = {tr_d:.2} vs tr Cov(g) = {tr_g:.2}");
            }
        }
    }
    let detail =
        format!("30 cells: worst tr Cov(d) − (tr Cov(g) + 3·SE) = {worst_margin:.3e}; {detail_part}");
    if worst_margin <= 0.0 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// Analytic gradients match central finite differences at random points.
pub fn check_gradient_finite_difference() -> CheckReport {
    const NAME: &str = "gradient-finite-difference";
    let mut rng = RandomSource::new(55);
    let quad = gen_quadratic(12, 100.0, 0.0, &mut rng).expect("quadratic");
    let logi = gen_logistic(80, 10, 50.0, 0.1, 0.1, &mut rng).expect("logistic");
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = gaussian_vector(12, &mut rng);
        let g = quad.exact_gradient(&x);
        let fd = oracle::finite_difference_gradient(|v| quad.loss(v), &x, 1e-6);
        let mut diff = g.clone();
        diff.add_scaled(-1.0, &fd);
        worst = worst.max(norm2(diff.as_slice()) / norm2(g.as_slice()));

        let w = gaussian_vector(10, &mut rng);
        let all: Vec<usize> = (0..logi.n()).collect();
        let lg = crate::problems::logistic_minibatch_gradient(&logi, &w, &all).expect("grad");
        let lfd = oracle::finite_difference_gradient(|v| logistic_loss(&logi, v), &w, 1e-6);
        let mut ldiff = lg.clone();
        ldiff.add_scaled(-1.0, &lfd);
        worst = worst.max(norm2(ldiff.as_slice()) / norm2(lg.as_slice()));
    }
    let detail = format!("max relative deviation {worst:.2e} (limit 1e-6)");
    if worst <= 1e-6 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// `ska_step(s = 1, monomial, λ = 0)` is `sgd_step`; `nesterov(β = 0)` is
/// `sgd_step`. Checked per-step over 100 steps on fixed batches.
pub fn check_reduction_identities() -> CheckReport {
    const NAME: &str = "reduction-identities";
    let mut rng = RandomSource::new(77);
    let p = Problem::Quadratic(gen_quadratic(10, 100.0, 0.0, &mut rng).expect("problem"));
    let ska_cfg = OptConfig {
        s: 1,
        gram_reg: 0.0,
        m_sweeps: 1,
        basis_kind: BasisKind::Monomial,
        eta: 0.005,
        ..OptConfig::ska_basic()
    };
    let sgd_cfg = OptConfig {
        eta: 0.005,
        ..OptConfig::sgd()
    };
    let nes_cfg = OptConfig {
        beta: 0.0,
        eta: 0.005,
        ..OptConfig::nesterov()
    };
    let w0 = gaussian_vector(10, &mut rng);
    let mut ska_state = OptimizerState::new(&p, &ska_cfg, w0.clone());
    let mut nes_state = OptimizerState::new(&p, &nes_cfg, w0.clone());
    let mut sgd_state = OptimizerState::new(&p, &sgd_cfg, w0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        ska_step(&mut ska_state, &p, &[], &ska_cfg, &mut RandomSource::new(0)).expect("ska");
        nesterov_step(&mut nes_state, &p, &[], &nes_cfg, &mut RandomSource::new(0))
            .expect("nesterov");
        sgd_step(&mut sgd_state, &p, &[], &sgd_cfg, &mut RandomSource::new(0)).expect("sgd");
        for i in 0..10 {
            let scale = sgd_state.w[i].abs().max(1.0);
            worst = worst.max((ska_state.w[i] - sgd_state.w[i]).abs() / scale);
            worst = worst.max((nes_state.w[i] - sgd_state.w[i]).abs() / scale);
        }
    }
    let detail = format!("max per-step deviation {worst:.2e} (limit 1e-14)");
    if worst <= 1e-14 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// With an orthonormalized basis the projected direction never exceeds
/// the gradient norm.
pub fn check_projection_boundedness() -> CheckReport {
    const NAME: &str = "projection-boundedness";
    let mut rng = RandomSource::new(88);
    let p = gen_quadratic(30, 1e4, 1.0, &mut rng).expect("problem");
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let w = gaussian_vector(30, &mut rng);
        // frozen per-instance noise, matching the fixed-batch contract
        let mut eps = gaussian_vector(30, &mut rng);
        eps.scale(p.noise_sigma);
        let oracle_fn = |x: &DenseVector| {
            let mut g = p.exact_gradient(x);
            g.add_scaled(1.0, &eps);
            Ok(g)
        };
        let g = oracle_fn(&w).expect("gradient");
        let cols = perturbation_columns(oracle_fn, &w, &g, 6, 1e-6, None).expect("columns");
        let z = chebyshev_basis(&cols, 6, &ChebyshevParams::default(), BasisSource::Perturbation)
            .expect("basis")
            .z;
        for lambda in [0.0, 1e-4, 1e-1] {
            let cfg = GramSolveConfig {
                lambda_reg: lambda,
                sweeps: 2,
                verbatim_sweeps: false,
            };
            let solve = streaming_gauss_seidel(&z, &g, &cfg).expect("solve");
            let pg = z.matvec(&solve.alpha);
            worst = worst.max(norm2(pg.as_slice()) / norm2(g.as_slice()));
        }
    }
    let detail = format!("max ‖Πg‖/‖g‖ = {worst:.12} (limit 1 + 1e-10)");
    if worst <= 1.0 + 1e-10 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// Gauss-Seidel sweeps make monotone progress: the energy norm of the
/// error never increases (any SPD Gram), and on the near-orthonormal
/// systems the solver actually sees, the residual norm does not grow
/// either. (Residual 2-norms on general SPD systems are not monotone;
/// the classical convergence statement is the energy-norm one.)
pub fn check_sweep_monotonicity() -> CheckReport {
    const NAME: &str = "sweep-monotonicity";
    let mut rng = RandomSource::new(99);
    let mut worst_energy_jump = 0.0f64;
    let mut worst_residual_jump = 0.0f64;
    for trial in 0..20 {
        let c = 0.2 + 0.15 * (trial % 5) as f64;
        let raw = correlated_columns(30, 6, c, &mut rng);
        let g = gaussian_vector(30, &mut rng);

        // energy norm on the raw (possibly badly conditioned) basis
        let gram = explicit_gram(&raw, 1e-4);
        let exact = dense_oracle_solve(&raw, &g, 1e-4).expect("oracle");
        let mut last_energy = f64::INFINITY;
        for m in 1..=6 {
            let cfg = GramSolveConfig {
                lambda_reg: 1e-4,
                sweeps: m,
                verbatim_sweeps: false,
            };
            let r = streaming_gauss_seidel(&raw, &g, &cfg).expect("solve");
            let mut e = r.alpha.clone();
            e.add_scaled(-1.0, &exact);
            let ge = gram.matvec(&e);
            let energy = dot(e.as_slice(), ge.as_slice()).max(0.0).sqrt();
            if energy > last_energy {
                worst_energy_jump = worst_energy_jump.max(energy - last_energy);
            }
            last_energy = energy;
        }

        // residual norm on the orthonormalized basis
        let z = chebyshev_basis(&raw, 6, &ChebyshevParams::default(), BasisSource::History)
            .expect("basis")
            .z;
        let mut last_res = f64::INFINITY;
        for m in 1..=6 {
            let cfg = GramSolveConfig {
                lambda_reg: 1e-4,
                sweeps: m,
                verbatim_sweeps: false,
            };
            let r = streaming_gauss_seidel(&z, &g, &cfg).expect("solve");
            if r.residual_norm > last_res {
                worst_residual_jump = worst_residual_jump.max(r.residual_norm - last_res);
            }
            last_res = r.residual_norm;
        }
    }
    let detail = format!(
        "worst energy-norm increase {worst_energy_jump:.2e}, worst residual increase {worst_residual_jump:.2e} (slack 1e-15)"
    );
    if worst_energy_jump <= 1e-15 && worst_residual_jump <= 1e-15 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// Perturbation columns on a noiseless quadratic span the true Krylov
/// subspace: principal angles stay under 1e-3 radians for s ≤ 4.
pub fn check_subspace_angle() -> CheckReport {
    const NAME: &str = "subspace-angle";
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let mut rng = RandomSource::new(300 + seed);
        let p = gen_quadratic(20, 1e4, 0.0, &mut rng).expect("problem");
        let w = gaussian_vector(20, &mut rng);
        let g = p.exact_gradient(&w);
        for s in 2..=4usize {
            let cols = perturbation_columns(|x| Ok(p.exact_gradient(x)), &w, &g, s, 1e-6, None)
                .expect("columns");
            let krylov = oracle::explicit_krylov_basis(&p.h, &g, s);
            let angles = oracle::principal_angles(&cols, &krylov);
            worst = worst.max(angles.last().copied().unwrap_or(0.0));
        }
    }
    let detail = format!("max principal angle {worst:.2e} rad (limit 1e-3)");
    if worst <= 1e-3 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// Chebyshev + QR never worsens the regularized Gram conditioning
/// relative to the normalized monomial basis on the same columns.
pub fn check_chebyshev_conditioning() -> CheckReport {
    const NAME: &str = "chebyshev-gram-conditioning";
    let mut worst_ratio = 0.0f64;
    for seed in 0..5u64 {
        let mut rng = RandomSource::new(400 + seed);
        let p = gen_quadratic(100, 1e4, 0.0, &mut rng).expect("problem");
        let w = gaussian_vector(100, &mut rng);
        let g = p.exact_gradient(&w);
        let cols = perturbation_columns(|x| Ok(p.exact_gradient(x)), &w, &g, 16, 1e-6, None)
            .expect("columns");
        let cheb = chebyshev_basis(&cols, 16, &ChebyshevParams::default(), BasisSource::Perturbation)
            .expect("cheb");
        let mono = monomial_basis(&cols, BasisSource::Perturbation).expect("mono");
        let kc = oracle::condition_number_sym(&explicit_gram(&cheb.z, 1e-4));
        let km = oracle::condition_number_sym(&explicit_gram(&mono.z, 1e-4));
        worst_ratio = worst_ratio.max(kc / km);
    }
    let detail = format!("max κ(chebyshev)/κ(monomial) = {worst_ratio:.3e} (limit 1)");
    if worst_ratio <= 1.0 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

/// Noiseless strongly convex quadratic with η ≤ 1/L: the recorded error
/// norms decrease monotonically once the history buffer is warm.
pub fn check_error_monotonicity() -> CheckReport {
    const NAME: &str = "noiseless-error-monotonicity";
    let mut rng = RandomSource::new(500);
    let p = Problem::Quadratic(gen_quadratic(12, 100.0, 0.0, &mut rng).expect("problem"));
    let cfg = OptConfig {
        eta: 0.009,
        s: 4,
        ..OptConfig::ska_chebyshev()
    };
    let rec = run(&p, OptimizerKind::Ska, &cfg, 60, 1, RandomSource::new(501), "ska");
    let mut worst = 0.0f64;
    for pair in rec.records.windows(2) {
        if pair[0].iter >= 4 {
            worst = worst.max(pair[1].err_norm - pair[0].err_norm);
        }
    }
    let detail = format!("worst err_norm increase {worst:.2e} (slack 1e-12)");
    if !rec.diverged && worst <= 1e-12 {
        CheckReport::pass(NAME, detail)
    } else {
        CheckReport::fail(NAME, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // The cheap checks run directly; the heavyweight ones are covered by
    // the acceptance suite so the unit pass stays fast.
    #[test]
    fn quick_checks_pass() {
        for check in [
            check_gram_oracle_equivalence,
            check_gradient_finite_difference,
            check_reduction_identities,
            check_projection_boundedness,
            check_sweep_monotonicity,
            check_subspace_angle,
            check_error_monotonicity,
        ] {
            let r = check();
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
