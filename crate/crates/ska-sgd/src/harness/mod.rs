//! Multi-seed experiment runner: configuration, deterministic seed
//! derivation, a bounded worker pool, aggregation, and CSV/SVG artifacts.
//!
//! Seeds. Every cell seed is a splitmix64 mix of the master seed and the
//! cell indices: problem instances use `mix(master, [1, problem_index,
//! trial_index, attempt])` so all optimizers in a trial see the same
//! instance, and runs use `mix(master, [2, problem_index,
//! optimizer_index, trial_index])`. Results are merged by index, never by
//! completion order, so `--jobs` does not change any output byte.

pub mod csv;
pub mod svg;

use crate::basis::{BasisKind, BasisSource, ChebyshevParams};
use crate::error::{Error, Result};
use crate::optim::{run, OptConfig, OptimizerKind, StepRecord, TrialRecord};
use crate::problems::{gen_clustered, gen_logistic, gen_quadratic, Problem};
use crate::numerics::RandomSource;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Problem block of an experiment file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    /// "quadratic" | "clustered" | "logistic"
    pub family: String,
    pub d: usize,
    /// One experiment variant per condition number; ignored by the
    /// clustered family (its spectrum fixes the conditioning).
    #[serde(default)]
    pub kappa: Vec<f64>,
    /// Gradient-noise standard deviation (quadratic families).
    #[serde(default)]
    pub noise_sigma: f64,
    /// Sample count (logistic).
    #[serde(default)]
    pub n: Option<usize>,
    /// Relative label-noise scale (logistic).
    #[serde(default = "default_label_noise")]
    pub label_noise: f64,
    /// Ridge scale; the ridge weight is `lambda_scale / kappa`.
    #[serde(default = "default_lambda_scale")]
    pub lambda_scale: f64,
}

fn default_label_noise() -> f64 {
    0.1
}

fn default_lambda_scale() -> f64 {
    0.1
}

/// One optimizer entry: a kind, an optional named ska variant for the
/// defaults, and field-level overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub name: String,
    /// "sgd" | "nesterov" | "adam" | "ska"
    pub kind: String,
    /// ska defaults: "basic" | "chebyshev" | "chebyshev_nesterov" | "ultimate"
    #[serde(default)]
    pub variant: Option<String>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub beta2: Option<f64>,
    #[serde(default)]
    pub eps_adam: Option<f64>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub m_sweeps: Option<usize>,
    #[serde(default)]
    pub gram_reg: Option<f64>,
    #[serde(default)]
    pub cheb_a: Option<f64>,
    #[serde(default)]
    pub cheb_b: Option<f64>,
    /// "history" | "perturbation"
    #[serde(default)]
    pub basis_source: Option<String>,
    /// "monomial" | "chebyshev"
    #[serde(default)]
    pub basis_kind: Option<String>,
    #[serde(default)]
    pub use_nesterov: Option<bool>,
    #[serde(default)]
    pub use_jacobi: Option<bool>,
    #[serde(default)]
    pub delta_perturb: Option<f64>,
    #[serde(default)]
    pub nesterov_lookahead: Option<bool>,
    #[serde(default)]
    pub verbatim_sweeps: Option<bool>,
}

impl OptimizerSpec {
    pub fn resolve(&self, family: &str) -> Result<(OptimizerKind, OptConfig)> {
        let (kind, mut cfg) = match self.kind.as_str() {
            "sgd" => (OptimizerKind::Sgd, OptConfig::sgd()),
            "nesterov" => (OptimizerKind::Nesterov, OptConfig::nesterov()),
            "adam" => (OptimizerKind::Adam, OptConfig::adam()),
            "ska" => {
                let cfg = match self.variant.as_deref() {
                    None | Some("basic") => OptConfig::ska_basic(),
                    Some("chebyshev") => OptConfig::ska_chebyshev(),
                    Some("chebyshev_nesterov") => OptConfig::ska_chebyshev_nesterov(),
                    Some("ultimate") => OptConfig::ska_ultimate(),
                    Some(other) => {
                        return Err(Error::Config(format!("unknown ska variant {other:?}")))
                    }
                };
                (OptimizerKind::Ska, cfg)
            }
            other => return Err(Error::Config(format!("unknown optimizer kind {other:?}"))),
        };
        if self.variant.is_some() && kind != OptimizerKind::Ska {
            return Err(Error::Config(
                "variant is only meaningful for kind = \"ska\"".into(),
            ));
        }
        // batch-size defaults differ by family
        if family == "logistic" {
            cfg.batch_size = match kind {
                OptimizerKind::Ska => 64,
                _ => 128,
            };
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.beta2 {
            cfg.beta2 = v;
        }
        if let Some(v) = self.eps_adam {
            cfg.eps_adam = v;
        }
        if let Some(v) = self.batch_size {
            cfg.batch_size = v;
        }
        if let Some(v) = self.s {
            cfg.s = v;
        }
        if let Some(v) = self.m_sweeps {
            cfg.m_sweeps = v;
        }
        if let Some(v) = self.gram_reg {
            cfg.gram_reg = v;
        }
        let a = self.cheb_a.unwrap_or(cfg.cheb.a);
        let b = self.cheb_b.unwrap_or(cfg.cheb.b);
        cfg.cheb = ChebyshevParams::new(a, b);
        if let Some(src) = &self.basis_source {
            cfg.basis_source = match src.as_str() {
                "history" => BasisSource::History,
                "perturbation" => BasisSource::Perturbation,
                other => return Err(Error::Config(format!("unknown basis_source {other:?}"))),
            };
        }
        if let Some(k) = &self.basis_kind {
            cfg.basis_kind = match k.as_str() {
                "monomial" => BasisKind::Monomial,
                "chebyshev" => BasisKind::Chebyshev,
                other => return Err(Error::Config(format!("unknown basis_kind {other:?}"))),
            };
        }
        if let Some(v) = self.use_nesterov {
            cfg.use_nesterov = v;
        }
        if let Some(v) = self.use_jacobi {
            cfg.use_jacobi = v;
        }
        if let Some(v) = self.delta_perturb {
            cfg.delta_perturb = v;
        }
        if let Some(v) = self.nesterov_lookahead {
            cfg.nesterov_lookahead = v;
        }
        if let Some(v) = self.verbatim_sweeps {
            cfg.verbatim_sweeps = v;
        }
        Ok((kind, cfg))
    }
}

/// A full experiment description. Unknown JSON keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub optimizers: Vec<OptimizerSpec>,
    pub iterations: usize,
    pub checkpoint_every: usize,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.iterations < 1 || self.checkpoint_every < 1 {
            return Err(Error::Config("iterations and checkpoint_every must be >= 1".into()));
        }
        if self.optimizers.is_empty() {
            return Err(Error::Config("at least one optimizer is required".into()));
        }
        for k in &self.problem.kappa {
            if *k < 1.0 {
                return Err(Error::Config(format!("kappa {k} < 1")));
            }
        }
        match self.problem.family.as_str() {
            "quadratic" => {
                if self.problem.kappa.is_empty() {
                    return Err(Error::Config("quadratic family needs a kappa list".into()));
                }
            }
            "clustered" => {}
            "logistic" => {
                if self.problem.kappa.is_empty() {
                    return Err(Error::Config("logistic family needs a kappa list".into()));
                }
                let n = self
                    .problem
                    .n
                    .ok_or_else(|| Error::Config("logistic family needs n".into()))?;
                if n <= self.problem.d {
                    return Err(Error::Config("logistic needs n > d".into()));
                }
            }
            other => return Err(Error::Config(format!("unknown family {other:?}"))),
        }
        for o in &self.optimizers {
            o.resolve(&self.problem.family)?;
        }
        Ok(())
    }

    /// Problem variants: one per kappa (a single "clustered" variant for
    /// that family).
    pub fn variants(&self) -> Vec<(String, Option<f64>)> {
        if self.problem.family == "clustered" {
            vec![("clustered".to_string(), None)]
        } else {
            self.problem
                .kappa
                .iter()
                .map(|k| (format!("k{:e}", k), Some(*k)))
                .collect()
        }
    }
}

/// splitmix64 finalizer; the documented seed mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold `parts` into `master` with splitmix64.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// Mean/std/min/max over non-diverged trials (population std).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricStats {
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

pub fn metric_stats(metric: &str, values: &[f64]) -> MetricStats {
    let n = values.len();
    assert!(n > 0, "no values to aggregate");
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    MetricStats {
        metric: metric.to_string(),
        mean,
        std: var.sqrt(),
        min,
        max,
        n,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckpointStats {
    pub iter: usize,
    pub stats: Vec<MetricStats>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateStats {
    pub checkpoints: Vec<CheckpointStats>,
    /// Summary rows: final_loss, final_err_norm, final_obj_gap, iters_to_95.
    pub summary: Vec<MetricStats>,
    pub diverged_count: usize,
    pub n_trials: usize,
}

/// Results for one (problem variant, optimizer) cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    /// "experiment-name/variant"
    pub experiment: String,
    pub variant: String,
    pub optimizer: String,
    pub trials: Vec<TrialRecord>,
    pub aggregate: AggregateStats,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub name: String,
    pub cells: Vec<CellResult>,
    /// Files written, when an output directory was set.
    pub written: Vec<PathBuf>,
}

/// Execution knobs that come from the command line rather than the file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed_override: Option<u64>,
    pub trials_override: Option<usize>,
    pub jobs: Option<usize>,
    pub eta_multiplier: Option<f64>,
    pub quiet: bool,
}

/// Smallest checkpoint iteration that reaches 95% of the trace's total
/// loss decrease; the final iteration when there is no progress.
pub fn iterations_to_95(records: &[StepRecord]) -> usize {
    assert!(records.len() >= 2, "need at least two checkpoints");
    let f0 = records[0].loss;
    let f_t = records[records.len() - 1].loss;
    let last_iter = records[records.len() - 1].iter;
    if f_t >= f0 {
        return last_iter; // NoProgress sentinel
    }
    let target = 0.95 * (f0 - f_t);
    for r in records {
        if f0 - r.loss >= target {
            return r.iter;
        }
    }
    last_iter
}

fn aggregate_cell(trials: &[TrialRecord], iterations: usize) -> AggregateStats {
    let live: Vec<&TrialRecord> = trials.iter().filter(|t| !t.diverged).collect();
    let diverged_count = trials.len() - live.len();
    let mut checkpoints = Vec::new();
    let mut summary = Vec::new();
    if !live.is_empty() {
        let n_check = live.iter().map(|t| t.records.len()).min().unwrap_or(0);
        for ci in 0..n_check {
            let iter = live[0].records[ci].iter;
            let collect = |f: fn(&StepRecord) -> f64| -> Vec<f64> {
                live.iter().map(|t| f(&t.records[ci])).collect()
            };
            let stats = vec![
                metric_stats("loss", &collect(|r| r.loss)),
                metric_stats("grad_norm", &collect(|r| r.grad_norm)),
                metric_stats("err_norm", &collect(|r| r.err_norm)),
                metric_stats("obj_gap", &collect(|r| r.obj_gap)),
            ];
            checkpoints.push(CheckpointStats { iter, stats });
        }
        let finals = |f: fn(&StepRecord) -> f64| -> Vec<f64> {
            live.iter()
                .map(|t| f(t.records.last().expect("non-diverged trial has records")))
                .collect()
        };
        summary.push(metric_stats("final_loss", &finals(|r| r.loss)));
        summary.push(metric_stats("final_err_norm", &finals(|r| r.err_norm)));
        summary.push(metric_stats("final_obj_gap", &finals(|r| r.obj_gap)));
        let it95: Vec<f64> = live
            .iter()
            .filter(|t| t.records.len() >= 2)
            .map(|t| iterations_to_95(&t.records) as f64)
            .collect();
        if !it95.is_empty() {
            summary.push(metric_stats("iters_to_95", &it95));
        }
    }
    let _ = iterations;
    AggregateStats {
        checkpoints,
        summary,
        diverged_count,
        n_trials: trials.len(),
    }
}

fn generate_problem(cfg: &ExperimentConfig, kappa: Option<f64>, master: u64, pi: u64, ti: u64) -> Result<Problem> {
    let spec = &cfg.problem;
    for attempt in 0u64..32 {
        let seed = derive_seed(master, &[1, pi, ti, attempt]);
        let mut rng = RandomSource::new(seed);
        let made = match spec.family.as_str() {
            "quadratic" => gen_quadratic(spec.d, kappa.unwrap(), spec.noise_sigma, &mut rng)
                .map(Problem::Quadratic),
            "clustered" => {
                gen_clustered(spec.d, spec.noise_sigma, &mut rng).map(Problem::Quadratic)
            }
            "logistic" => gen_logistic(
                spec.n.unwrap(),
                spec.d,
                kappa.unwrap(),
                spec.label_noise,
                spec.lambda_scale,
                &mut rng,
            )
            .map(Problem::Logistic),
            other => return Err(Error::Config(format!("unknown family {other:?}"))),
        };
        match made {
            Ok(p) => return Ok(p),
            // degenerate draw: retry with the next attempt seed
            Err(Error::RankDeficient { .. }) | Err(Error::DegenerateLabels(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Config(
        "32 consecutive degenerate problem draws; check the problem spec".into(),
    ))
}

/// Run every (variant, optimizer, trial) cell of an experiment.
///
/// Trials run in a bounded rayon pool; records are merged by index so the
/// output is independent of scheduling. Per-trial CSVs, an aggregate CSV,
/// and an SVG + dat plot are written per variant when an output directory
/// is configured.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed_override {
        cfg.master_seed = seed;
    }
    if let Some(trials) = opts.trials_override {
        cfg.trials = trials;
    }
    if let Some(mult) = opts.eta_multiplier {
        for o in &mut cfg.optimizers {
            let (_, base) = o.resolve(&cfg.problem.family)?;
            o.eta = Some(o.eta.unwrap_or(base.eta) * mult);
        }
    }
    cfg.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let variants = cfg.variants();
    let master = cfg.master_seed;
    let resolved: Vec<(OptimizerKind, OptConfig)> = cfg
        .optimizers
        .iter()
        .map(|o| o.resolve(&cfg.problem.family))
        .collect::<Result<_>>()?;

    // Problems are shared across optimizers within a (variant, trial) pair.
    let mut problem_tasks = Vec::new();
    for (pi, (_, kappa)) in variants.iter().enumerate() {
        for ti in 0..cfg.trials {
            problem_tasks.push((pi, *kappa, ti));
        }
    }
    let problems: Vec<Result<Problem>> = pool.install(|| {
        problem_tasks
            .par_iter()
            .map(|(pi, kappa, ti)| generate_problem(&cfg, *kappa, master, *pi as u64, *ti as u64))
            .collect()
    });
    let mut problem_map = std::collections::HashMap::new();
    for ((pi, _, ti), p) in problem_tasks.iter().zip(problems.into_iter()) {
        problem_map.insert((*pi, *ti), p?);
    }

    let mut trial_tasks = Vec::new();
    for pi in 0..variants.len() {
        for (oi, _) in cfg.optimizers.iter().enumerate() {
            for ti in 0..cfg.trials {
                trial_tasks.push((pi, oi, ti));
            }
        }
    }
    let trial_results: Vec<TrialRecord> = pool.install(|| {
        trial_tasks
            .par_iter()
            .map(|(pi, oi, ti)| {
                let problem = &problem_map[&(*pi, *ti)];
                let (kind, ocfg) = &resolved[*oi];
                let seed = derive_seed(master, &[2, *pi as u64, *oi as u64, *ti as u64]);
                run(
                    problem,
                    *kind,
                    ocfg,
                    cfg.iterations,
                    cfg.checkpoint_every,
                    RandomSource::new(seed),
                    &cfg.optimizers[*oi].name,
                )
            })
            .collect()
    });

    let mut by_cell: std::collections::HashMap<(usize, usize), Vec<TrialRecord>> =
        std::collections::HashMap::new();
    for ((pi, oi, _ti), rec) in trial_tasks.iter().zip(trial_results.into_iter()) {
        by_cell.entry((*pi, *oi)).or_default().push(rec);
    }

    let mut cells = Vec::new();
    for (pi, (vlabel, _)) in variants.iter().enumerate() {
        for (oi, ospec) in cfg.optimizers.iter().enumerate() {
            let trials = by_cell.remove(&(pi, oi)).expect("all cells executed");
            let aggregate = aggregate_cell(&trials, cfg.iterations);
            if !opts.quiet {
                let last = aggregate
                    .checkpoints
                    .last()
                    .and_then(|c| c.stats.first())
                    .map(|s| s.mean)
                    .unwrap_or(f64::NAN);
                eprintln!(
                    "{} / {} / {}: final mean loss {last:.6e} ({} diverged)",
                    cfg.name, vlabel, ospec.name, aggregate.diverged_count
                );
            }
            cells.push(CellResult {
                experiment: format!("{}/{}", cfg.name, vlabel),
                variant: vlabel.clone(),
                optimizer: ospec.name.clone(),
                trials,
                aggregate,
            });
        }
    }

    let mut written = Vec::new();
    if let Some(dir) = opts
        .out_dir
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
    {
        written = write_artifacts(&cfg, &variants, &cells, &dir)?;
    }
    Ok(ExperimentResult {
        name: cfg.name.clone(),
        cells,
        written,
    })
}

fn write_artifacts(
    cfg: &ExperimentConfig,
    variants: &[(String, Option<f64>)],
    cells: &[CellResult],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (vlabel, _) in variants {
        let vdir = dir.join(&cfg.name).join(vlabel);
        std::fs::create_dir_all(&vdir).map_err(|e| Error::io(vdir.display().to_string(), e))?;
        let vcells: Vec<&CellResult> = cells.iter().filter(|c| &c.variant == vlabel).collect();

        // per-trial CSVs
        for cell in &vcells {
            for (ti, trial) in cell.trials.iter().enumerate() {
                let path = vdir.join(format!("{}__trial{}.csv", cell.optimizer, ti));
                csv::write_text(&path, &csv::trial_csv(&cell.experiment, trial))?;
                written.push(path);
            }
        }

        // aggregate CSV
        let mut agg = String::from(csv::AGGREGATE_HEADER);
        agg.push('\n');
        for cell in &vcells {
            for cp in &cell.aggregate.checkpoints {
                for st in &cp.stats {
                    agg.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        cell.experiment,
                        cell.optimizer,
                        cp.iter,
                        st.metric,
                        csv::fmt_f64(st.mean),
                        csv::fmt_f64(st.std),
                        csv::fmt_f64(st.min),
                        csv::fmt_f64(st.max),
                        st.n
                    ));
                }
            }
            for st in &cell.aggregate.summary {
                agg.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    cell.experiment,
                    cell.optimizer,
                    cfg.iterations,
                    st.metric,
                    csv::fmt_f64(st.mean),
                    csv::fmt_f64(st.std),
                    csv::fmt_f64(st.min),
                    csv::fmt_f64(st.max),
                    st.n
                ));
            }
            agg.push_str(&format!(
                "{},{},{},diverged_trials,{},0,0,0,{}\n",
                cell.experiment,
                cell.optimizer,
                cfg.iterations,
                cell.aggregate.diverged_count,
                cell.aggregate.n_trials
            ));
        }
        let agg_path = vdir.join("aggregate.csv");
        csv::write_text(&agg_path, &agg)?;
        written.push(agg_path);

        // plot: obj_gap for quadratic families, loss for logistic
        let metric_name = if cfg.problem.family == "logistic" {
            "loss"
        } else {
            "obj_gap"
        };
        let series: Vec<svg::Series> = vcells
            .iter()
            .filter(|c| !c.aggregate.checkpoints.is_empty())
            .map(|c| svg::Series {
                label: c.optimizer.clone(),
                points: c
                    .aggregate
                    .checkpoints
                    .iter()
                    .map(|cp| {
                        let st = cp
                            .stats
                            .iter()
                            .find(|s| s.metric == metric_name)
                            .expect("metric present");
                        (cp.iter as f64, st.mean, st.std)
                    })
                    .collect(),
            })
            .collect();
        if !series.is_empty() {
            let title = format!("{} / {vlabel}: {metric_name} vs iteration", cfg.name);
            let svg_path = vdir.join("plot.svg");
            csv::write_text(&svg_path, &svg::render(&title, metric_name, &series))?;
            written.push(svg_path);
            let dat_path = vdir.join("plot.dat");
            csv::write_text(&dat_path, &svg::render_dat(&series))?;
            written.push(dat_path);
        }
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// Shipped presets
// ---------------------------------------------------------------------------

pub const PRESET_NAMES: [&str; 5] = [
    "quadratic-k1e4",
    "quadratic-k1e8-ultimate",
    "krylov-dim-ablation",
    "logistic-sweep",
    "late-stage-clustered",
];

/// Load a shipped preset by name.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = match name {
        "quadratic-k1e4" => include_str!("../../presets/quadratic-k1e4.json"),
        "quadratic-k1e8-ultimate" => include_str!("../../presets/quadratic-k1e8-ultimate.json"),
        "krylov-dim-ablation" => include_str!("../../presets/krylov-dim-ablation.json"),
        "logistic-sweep" => include_str!("../../presets/logistic-sweep.json"),
        "late-stage-clustered" => include_str!("../../presets/late-stage-clustered.json"),
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    ExperimentConfig::from_json(text)
}
