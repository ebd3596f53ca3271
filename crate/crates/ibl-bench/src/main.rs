//! Benchmark CLI: run experiments, compare the two engines, verify their
//! decision-for-decision equivalence, and check the vectorized math against
//! a scalar oracle.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use ibl_bench::config::{EngineId, EngineKind, ExperimentConfig, TaskId};
use ibl_bench::{csv, equivalence, oracle, runner};

#[derive(Parser)]
#[command(name = "ibl-bench", about = "Instance-based learning engine benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Task environment.
    #[arg(long, value_enum)]
    task: TaskId,
    /// Number of runs (independent agent lifetimes).
    #[arg(long, default_value_t = 10)]
    runs: u32,
    /// Episodes per run.
    #[arg(long, default_value_t = 25)]
    episodes: u32,
    /// Trials per run; alias for --episodes on the one-trial-per-episode
    /// tasks (binary, insider).
    #[arg(long)]
    trials: Option<u32>,
    /// Step limit per episode.
    #[arg(long, default_value_t = 2500)]
    steps: u64,
    /// Master seed; metric columns replay exactly for equal seeds.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Memory decay d.
    #[arg(long, default_value_t = 0.5)]
    d: f64,
    /// Activation noise sigma.
    #[arg(long, default_value_t = 0.25)]
    sigma: f64,
    /// Default utility override (task-specific default otherwise).
    #[arg(long)]
    default_utility: Option<f64>,
    /// ASCII map file (minimap, fireman).
    #[arg(long)]
    map: Option<PathBuf>,
    /// Scenario JSON file (insider).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Worker threads for runs (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl RunArgs {
    fn to_config(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::new(self.task);
        config.runs = self.runs;
        config.episodes = self.episodes;
        if let Some(trials) = self.trials {
            match self.task {
                TaskId::Binary | TaskId::Insider => config.episodes = trials,
                _ => bail!("--trials only applies to binary and insider"),
            }
        }
        config.step_limit = self.steps;
        config.seed = self.seed;
        config.decay = self.d;
        config.noise = self.sigma;
        config.default_utility = self.default_utility;
        config.map_path = self.map.clone();
        config.scenario_path = self.scenario.clone();
        config.threads = self.threads;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-episode CSV.
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Engine to run.
        #[arg(long, value_enum)]
        engine: EngineId,
        /// Output CSV path (engine name is appended when --engine both).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both engines on identical seeds and report times, metrics, the
    /// speedup ratio, and a Welch t-test on per-run means.
    Compare {
        #[command(flatten)]
        args: RunArgs,
        /// Optional CSV path; per-engine tables are written alongside it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay both engines on identical streams and assert identical
    /// decisions (one small configuration per task, or just --task).
    VerifyEquivalence {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        task: Option<TaskId>,
    },
    /// Compare the vectorized math against an independent scalar oracle on
    /// randomized memories.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn engine_out_path(base: &PathBuf, kind: EngineKind) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}-{}.{ext}", kind.name()))
}

fn run_and_report(config: &ExperimentConfig, kind: EngineKind, out: &PathBuf) -> Result<()> {
    let table = runner::run_experiment(config, kind)?;
    csv::write_csv(&table, out)?;
    println!(
        "{} engine: {} rows, mean metric {:.4}, mean time/run {:.6}s -> {}",
        kind.name(),
        table.rows.len(),
        table.mean_metric(),
        table.mean_seconds_per_run(),
        out.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { args, engine, out } => {
            let config = args.to_config()?;
            match engine {
                EngineId::Baseline => run_and_report(&config, EngineKind::Baseline, &out)?,
                EngineId::Speedy => run_and_report(&config, EngineKind::Speedy, &out)?,
                EngineId::Both => {
                    for kind in [EngineKind::Baseline, EngineKind::Speedy] {
                        run_and_report(&config, kind, &engine_out_path(&out, kind))?;
                    }
                }
            }
        }
        Command::Compare { args, out } => {
            let config = args.to_config()?;
            let comparison = runner::compare_engines(&config)?;
            print!("{comparison}");
            if let Some(base) = out {
                csv::write_csv(
                    &comparison.baseline_table,
                    &engine_out_path(&base, EngineKind::Baseline),
                )?;
                csv::write_csv(
                    &comparison.speedy_table,
                    &engine_out_path(&base, EngineKind::Speedy),
                )?;
            }
        }
        Command::VerifyEquivalence { seed, task } => {
            let battery = equivalence::standard_battery(seed);
            let selected: Vec<_> = battery
                .into_iter()
                .filter(|(_, config)| task.is_none_or(|t| config.task == t))
                .collect();
            let mut failures = 0;
            for (label, config) in &selected {
                match equivalence::verify_config(config)? {
                    None => println!("PASS {label}"),
                    Some(divergence) => {
                        failures += 1;
                        println!("FAIL {label}: {divergence}");
                    }
                }
            }
            if failures > 0 {
                bail!("{failures} of {} equivalence checks failed", selected.len());
            }
        }
        Command::OracleCheck { cases, seed } => {
            let report = oracle::oracle_check(cases, seed);
            println!("{report}");
            if report.max_deviation >= 1e-12 {
                bail!("oracle deviation {:.3e} exceeds 1e-12", report.max_deviation);
            }
        }
    }
    Ok(())
}
