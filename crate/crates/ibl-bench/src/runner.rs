//! Experiment execution: runs x episodes per engine, with per-episode
//! metrics and wall-clock timing.
//!
//! A run is one agent lifetime: fresh memory, a fresh environment, and its
//! own derived stream seed. Memory persists across the episodes of a run
//! and the global timestep never resets. Runs execute in parallel worker
//! threads; metric columns depend only on the seeds, never on the worker
//! count or timing.

use std::time::Instant;

use anyhow::Result;
use rayon::prelude::*;

use ibl_core::env::{binary, coopnav, fireman, insider, minimap, RunContext, StepTrace};
use ibl_core::{AgentStreams, BaselineEngine, Engine, EnvRng, SpeedyEngine};

use crate::config::{EngineKind, ExperimentConfig, TaskAssets, TaskId};
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub run: u32,
    pub episode: u32,
    pub metric: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub rows: Vec<EpisodeRecord>,
}

impl ResultTable {
    pub fn mean_metric(&self) -> f64 {
        stats::mean(&self.rows.iter().map(|r| r.metric).collect::<Vec<_>>())
    }

    pub fn total_seconds(&self) -> f64 {
        self.rows.iter().map(|r| r.seconds).sum()
    }

    pub fn mean_seconds_per_run(&self) -> f64 {
        let runs = self.run_count();
        self.total_seconds() / runs as f64
    }

    pub fn run_count(&self) -> usize {
        self.rows.iter().map(|r| r.run).max().map_or(0, |m| m as usize + 1)
    }

    /// Per-run metric means ordered by run index.
    pub fn per_run_means(&self) -> Vec<f64> {
        let runs = self.run_count();
        let mut sums = vec![0.0; runs];
        let mut counts = vec![0usize; runs];
        for row in &self.rows {
            sums[row.run as usize] += row.metric;
            counts[row.run as usize] += 1;
        }
        sums.iter()
            .zip(&counts)
            .map(|(s, &c)| s / c as f64)
            .collect()
    }
}

fn make_engine(kind: EngineKind) -> Box<dyn Engine> {
    match kind {
        EngineKind::Baseline => Box::new(BaselineEngine::new()),
        EngineKind::Speedy => Box::new(SpeedyEngine::new()),
    }
}

/// Executes one run and returns its per-episode records, optionally tracing
/// every decision.
pub fn run_single(
    config: &ExperimentConfig,
    assets: &TaskAssets,
    kind: EngineKind,
    run_index: u32,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> Vec<EpisodeRecord> {
    let params = assets.agent_params(config);
    let run_seed = ibl_core::streams::run_seed(config.seed, u64::from(run_index));
    let agents = config.task.agent_count();
    let streams: Vec<AgentStreams> = (0..agents)
        .map(|i| AgentStreams::new(run_seed, i as u64))
        .collect();
    let mut env_rng = EnvRng::for_run(run_seed);
    let mut engines: Vec<Box<dyn Engine>> = (0..agents).map(|_| make_engine(kind)).collect();
    let mut ctx = RunContext::new();

    let mut minimap_env = match config.task {
        TaskId::Minimap => Some(
            minimap::MinimapEnv::from_map(assets.map.as_ref().unwrap(), config.step_limit)
                .expect("map validated at load time"),
        ),
        _ => None,
    };
    let mut fireman_env = match config.task {
        TaskId::Fireman => Some(
            fireman::FiremanEnv::from_map(assets.map.as_ref().unwrap(), config.step_limit)
                .expect("map validated at load time"),
        ),
        _ => None,
    };
    let mut coopnav_env = match config.task {
        TaskId::Coopnav => Some(coopnav::CoopNavEnv::new(
            coopnav::DEFAULT_SIZE,
            config.step_limit,
            &mut env_rng,
        )),
        _ => None,
    };

    let mut rows = Vec::with_capacity(config.episodes as usize);
    for episode in 0..config.episodes {
        let started = Instant::now();
        let metric = match config.task {
            TaskId::Binary => binary::run_episode(
                engines[0].as_mut(),
                &mut ctx,
                &params,
                &streams[0],
                &mut env_rng,
                trace.as_deref_mut(),
            ),
            TaskId::Insider => insider::run_trial(
                engines[0].as_mut(),
                assets.scenario.as_ref().unwrap(),
                u64::from(episode),
                &mut ctx,
                &params,
                &streams[0],
                &mut env_rng,
                trace.as_deref_mut(),
            ),
            TaskId::Minimap => minimap::run_episode(
                engines[0].as_mut(),
                minimap_env.as_mut().unwrap(),
                &mut ctx,
                &params,
                &streams[0],
                trace.as_deref_mut(),
            ),
            TaskId::Fireman => fireman::run_episode(
                &mut engines,
                fireman_env.as_mut().unwrap(),
                &mut ctx,
                &params,
                &streams,
                &mut env_rng,
                trace.as_deref_mut(),
            ),
            TaskId::Coopnav => coopnav::run_episode(
                &mut engines,
                coopnav_env.as_mut().unwrap(),
                &mut ctx,
                &params,
                &streams,
                &mut env_rng,
                trace.as_deref_mut(),
            ),
        };
        rows.push(EpisodeRecord {
            run: run_index,
            episode,
            metric,
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    rows
}

/// Runs the whole experiment for one engine. Rows come back ordered by
/// (run, episode) regardless of how many workers executed them.
pub fn run_experiment(config: &ExperimentConfig, kind: EngineKind) -> Result<ResultTable> {
    config.validate()?;
    let assets = TaskAssets::load(config)?;
    assets.agent_params(config).validate()?;
    let run_one = |run_index: u32| run_single(config, &assets, kind, run_index, None);
    let mut rows: Vec<EpisodeRecord> = if config.threads == 1 || config.runs == 1 {
        (0..config.runs).flat_map(run_one).collect()
    } else if config.threads == 0 {
        (0..config.runs).into_par_iter().flat_map_iter(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()?;
        pool.install(|| (0..config.runs).into_par_iter().flat_map_iter(run_one).collect())
    };
    rows.sort_by_key(|r| (r.run, r.episode));
    Ok(ResultTable { rows })
}

/// Per-engine summary of a comparison.
#[derive(Debug, Clone)]
pub struct EngineSummary {
    pub mean_seconds_per_run: f64,
    pub mean_metric: f64,
    pub metric_sd: f64,
}

fn summarize(table: &ResultTable) -> EngineSummary {
    let per_run = table.per_run_means();
    EngineSummary {
        mean_seconds_per_run: table.mean_seconds_per_run(),
        mean_metric: table.mean_metric(),
        metric_sd: if per_run.len() > 1 { stats::std_dev(&per_run) } else { 0.0 },
    }
}

/// Both engines on identical seeds: per-engine tables, the baseline/speedy
/// time ratio, and a Welch t-test over per-run metric means.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub task: TaskId,
    pub runs: u32,
    pub episodes: u32,
    pub baseline: EngineSummary,
    pub speedy: EngineSummary,
    pub baseline_table: ResultTable,
    pub speedy_table: ResultTable,
    pub time_ratio: f64,
    pub welch: Option<(f64, f64)>,
}

pub fn compare_engines(config: &ExperimentConfig) -> Result<Comparison> {
    let baseline_table = run_experiment(config, EngineKind::Baseline)?;
    let speedy_table = run_experiment(config, EngineKind::Speedy)?;
    let baseline = summarize(&baseline_table);
    let speedy = summarize(&speedy_table);
    let time_ratio = baseline.mean_seconds_per_run / speedy.mean_seconds_per_run;
    let welch =
        stats::welch_t_test(&baseline_table.per_run_means(), &speedy_table.per_run_means()).ok();
    Ok(Comparison {
        task: config.task,
        runs: config.runs,
        episodes: config.episodes,
        baseline,
        speedy,
        baseline_table,
        speedy_table,
        time_ratio,
        welch,
    })
}

impl std::fmt::Display for Comparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "task {} | {} runs x {} episodes",
            self.task.name(),
            self.runs,
            self.episodes
        )?;
        for (name, s) in [("baseline", &self.baseline), ("speedy", &self.speedy)] {
            writeln!(
                f,
                "  {name:<8}  time/run {:>12.6}s   metric {:.4} +- {:.4}",
                s.mean_seconds_per_run, s.mean_metric, s.metric_sd
            )?;
        }
        writeln!(f, "  ratio (baseline/speedy): {:.2}", self.time_ratio)?;
        match self.welch {
            Some((t, p)) => writeln!(f, "  t-test on per-run means: t = {t:.2}, p = {p:.2}"),
            None => writeln!(f, "  t-test on per-run means: not defined for this sample"),
        }
    }
}
