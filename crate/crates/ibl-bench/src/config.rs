//! Experiment configuration and task assets.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use ibl_core::env::insider::InsiderScenario;
use ibl_core::env::{fireman, minimap, GridMap};
use ibl_core::AgentParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TaskId {
    Binary,
    Insider,
    Minimap,
    Fireman,
    Coopnav,
}

impl TaskId {
    pub fn agent_count(self) -> usize {
        match self {
            TaskId::Binary | TaskId::Insider | TaskId::Minimap => 1,
            TaskId::Fireman => 2,
            TaskId::Coopnav => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskId::Binary => "binary",
            TaskId::Insider => "insider",
            TaskId::Minimap => "minimap",
            TaskId::Fireman => "fireman",
            TaskId::Coopnav => "coopnav",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EngineId {
    Baseline,
    Speedy,
    Both,
}

/// Engines actually instantiated (Both resolves to the pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Baseline,
    Speedy,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Baseline => "baseline",
            EngineKind::Speedy => "speedy",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: TaskId,
    pub runs: u32,
    pub episodes: u32,
    pub step_limit: u64,
    pub seed: u64,
    pub decay: f64,
    pub noise: f64,
    pub default_utility: Option<f64>,
    pub map_path: Option<PathBuf>,
    /// Literal map text; takes precedence over `map_path`.
    pub map_text: Option<String>,
    pub scenario_path: Option<PathBuf>,
    /// Worker threads for runs; 0 uses the available parallelism.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(task: TaskId) -> Self {
        Self {
            task,
            runs: 10,
            episodes: 25,
            step_limit: 2500,
            seed: 1,
            decay: 0.5,
            noise: 0.25,
            default_utility: None,
            map_path: None,
            map_text: None,
            scenario_path: None,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 || self.episodes < 1 {
            bail!("runs and episodes must be at least 1");
        }
        if self.step_limit < 1 {
            bail!("step limit must be at least 1");
        }
        Ok(())
    }
}

/// Map or scenario data resolved once per experiment.
#[derive(Debug, Clone)]
pub struct TaskAssets {
    pub map: Option<GridMap>,
    pub scenario: Option<InsiderScenario>,
}

impl TaskAssets {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let mut assets = Self { map: None, scenario: None };
        match config.task {
            TaskId::Minimap | TaskId::Fireman => {
                let text = match (&config.map_text, &config.map_path) {
                    (Some(text), _) => text.clone(),
                    (None, Some(path)) => std::fs::read_to_string(path)
                        .with_context(|| format!("reading map {}", path.display()))?,
                    (None, None) => match config.task {
                        TaskId::Minimap => minimap::DEFAULT_MAP.to_string(),
                        _ => fireman::DEFAULT_MAP.to_string(),
                    },
                };
                assets.map = Some(GridMap::parse(&text)?);
            }
            TaskId::Insider => {
                let scenario = match &config.scenario_path {
                    Some(path) => {
                        let text = std::fs::read_to_string(path)
                            .with_context(|| format!("reading scenario {}", path.display()))?;
                        InsiderScenario::from_json(&text)?
                    }
                    None => InsiderScenario::default_scenario(),
                };
                assets.scenario = Some(scenario);
            }
            TaskId::Binary | TaskId::Coopnav => {}
        }
        Ok(assets)
    }

    /// Agent parameters for this task: configured decay/noise, the task's
    /// default utility unless overridden, and the insider similarity groups.
    pub fn agent_params(&self, config: &ExperimentConfig) -> AgentParams {
        let default_utility = config.default_utility.unwrap_or(match config.task {
            TaskId::Binary => 4.4,
            TaskId::Minimap => 0.1,
            TaskId::Fireman => 15.0,
            TaskId::Coopnav => 3.3,
            TaskId::Insider => self
                .scenario
                .as_ref()
                .expect("insider scenario loaded")
                .default_utility(),
        });
        let mut params = AgentParams::new(config.decay, config.noise, default_utility);
        if config.task == TaskId::Insider {
            params = params.with_similarity_groups(
                self.scenario
                    .as_ref()
                    .expect("insider scenario loaded")
                    .similarity_groups(),
            );
        }
        params
    }
}
