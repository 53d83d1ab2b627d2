// temp probe: GS monotonicity in residual vs energy norm
use ska_sgd::gram::{streaming_gauss_seidel, dense_oracle_solve, GramSolveConfig};
use ska_sgd::numerics::{gaussian_vector, DenseMatrix, DenseVector, RandomSource};
use ska_sgd::oracle;

fn correlated(d: usize, s: usize, c: f64, rng: &mut RandomSource) -> DenseMatrix {
    let base = gaussian_vector(d, rng);
    let cols: Vec<DenseVector> = (0..s).map(|_| {
        let mut col = base.clone();
        col.add_scaled(c, &gaussian_vector(d, rng));
        col
    }).collect();
    DenseMatrix::from_columns(&cols)
}

fn main() {
    for &c in &[0.2, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let mut rng = RandomSource::new(7);
        let mut worst_res_rel: f64 = 0.0;
        let mut worst_energy_rel: f64 = 0.0;
        let mut kmax: f64 = 0.0;
        for _ in 0..50 {
            let p = correlated(30, 6, c, &mut rng);
            let g = gaussian_vector(30, &mut rng);
            let mut gram = p.transpose().matmat(&p);
            for i in 0..6 { gram[(i,i)] += 1e-4; }
            kmax = kmax.max(oracle::condition_number_sym(&gram));
            let exact = dense_oracle_solve(&p, &g, 1e-4).unwrap();
            let mut last_r = f64::INFINITY;
            let mut last_e = f64::INFINITY;
            for m in 1..=8 {
                let r = streaming_gauss_seidel(&p, &g, &GramSolveConfig{lambda_reg:1e-4, sweeps:m, verbatim_sweeps:false}).unwrap();
                let mut e = r.alpha.clone();
                e.add_scaled(-1.0, &exact);
                let ge = gram.matvec(&e);
                let energy = ska_sgd::numerics::dot(e.as_slice(), ge.as_slice()).max(0.0).sqrt();
                if r.residual_norm > last_r {
                    worst_res_rel = worst_res_rel.max((r.residual_norm - last_r) / last_r.max(1e-300));
                }
                if energy > last_e {
                    worst_energy_rel = worst_energy_rel.max((energy - last_e) / last_e.max(1e-300));
                }
                last_r = r.residual_norm;
                last_e = energy;
            }
        }
        println!("c={c:<4} kappa_max={kmax:9.2e}  worst res increase(rel)={worst_res_rel:.2e}  worst energy increase(rel)={worst_energy_rel:.2e}");
    }
}
