//! Command-line front end: run experiment files, run shipped presets, and
//! verify the numerical property suite.

use clap::{Args, Parser, Subcommand};
use ska_sgd::harness::{preset, run_experiment, ExperimentConfig, RunOptions, PRESET_NAMES};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ska-sgd",
    version,
    about = "Krylov-accelerated SGD benchmarks: streaming Gauss-Seidel projection, Chebyshev bases, and ill-conditioned problem suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunFlags {
    /// Output directory (default: the config's output_dir, or ./out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed override
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Trial-count override
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Worker-pool size (default: logical cores)
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Multiply every optimizer's learning rate (stability experiments)
    #[arg(long, value_name = "F")]
    eta_multiplier: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config file
    Run {
        /// Path to the experiment config
        #[arg(value_name = "CONFIG.json")]
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a shipped preset by name
    Preset {
        /// One of the shipped preset names (see list-presets)
        name: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print the shipped preset names
    ListPresets,
    /// Run the numerical property suite and print pass/fail per property
    Verify {
        /// Worker-pool size for the checks (default: logical cores)
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
    },
}

fn options(flags: &RunFlags) -> RunOptions {
    RunOptions {
        out_dir: Some(flags.out.clone().unwrap_or_else(|| PathBuf::from("out"))),
        seed_override: flags.seed,
        trials_override: flags.trials,
        jobs: flags.jobs,
        eta_multiplier: flags.eta_multiplier,
        quiet: false,
    }
}

fn execute(cfg: &ExperimentConfig, flags: &RunFlags) -> ExitCode {
    let mut opts = options(flags);
    if flags.out.is_none() {
        if let Some(dir) = &cfg.output_dir {
            opts.out_dir = Some(PathBuf::from(dir));
        }
    }
    match run_experiment(cfg, &opts) {
        Ok(result) => {
            for path in &result.written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: experiment {:?} failed: {e}", cfg.name);
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, flags } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::FAILURE;
                }
            };
            match ExperimentConfig::from_json(&text) {
                Ok(cfg) => execute(&cfg, &flags),
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    ExitCode::FAILURE
                }
            }
        }
        Command::Preset { name, flags } => match preset(&name) {
            Ok(cfg) => execute(&cfg, &flags),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Verify { jobs } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()
                .expect("worker pool");
            let checks = ska_sgd::verify::all_checks();
            let reports: Vec<_> = pool.install(|| {
                use rayon::prelude::*;
                checks.par_iter().map(|c| c()).collect()
            });
            let mut all_ok = true;
            for r in &reports {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} — {}", r.name, r.detail);
                all_ok &= r.passed;
            }
            if all_ok {
                println!("all {} properties passed", reports.len());
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
