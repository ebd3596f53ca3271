//! Two-stage insider attack game.
//!
//! Each trial presents one layout of six computers, every computer carrying
//! a reward, a penalty, and a monitoring probability. The agent first picks
//! a computer (an IBL decision with partial matching over the three
//! attributes), then receives a possibly deceptive "monitored" signal, then
//! decides whether to continue or withdraw the attack. Continuing on an
//! unmonitored computer wins the reward; continuing on a monitored one loses
//! the penalty; withdrawing earns zero. The final outcome propagates back to
//! the stage-1 choice through delayed credit assignment.
//!
//! Computer values and the signaling strategy are scenario data, loaded from
//! a JSON file; the built-in default ships four layouts.

use std::fmt;

use serde::Deserialize;

use crate::engine::Engine;
use crate::key::{ActionId, OptionKey, StateKey};
use crate::params::{AgentParams, SimilarityFn, SimilarityGroup};
use crate::streams::{AgentStreams, EnvRng};

use super::{RunContext, StepTrace};

pub const COMPUTERS: usize = 6;
pub const CONTINUE: ActionId = 6;
pub const WITHDRAW: ActionId = 7;

pub const DEFAULT_SCENARIO_JSON: &str = include_str!("../../assets/insider_default.json");

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct ComputerProfile {
    pub reward: f64,
    pub penalty: f64,
    pub monitor_prob: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct Layout {
    pub computers: Vec<ComputerProfile>,
}

/// Probability of showing the "monitored" signal in each true state.
#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct Signaling {
    pub monitored_signal_prob: f64,
    pub unmonitored_signal_prob: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct InsiderScenario {
    pub layouts: Vec<Layout>,
    pub signaling: Signaling,
}

impl InsiderScenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: InsiderScenario =
            serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn default_scenario() -> Self {
        Self::from_json(DEFAULT_SCENARIO_JSON).expect("built-in scenario is valid")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.layouts.is_empty() {
            return Err(ScenarioError::NoLayouts);
        }
        for (i, layout) in self.layouts.iter().enumerate() {
            if layout.computers.len() != COMPUTERS {
                return Err(ScenarioError::WrongComputerCount {
                    layout: i,
                    found: layout.computers.len(),
                });
            }
            for c in &layout.computers {
                if !(0.0..=1.0).contains(&c.monitor_prob) {
                    return Err(ScenarioError::BadProbability(c.monitor_prob));
                }
                if !c.reward.is_finite() || !c.penalty.is_finite() {
                    return Err(ScenarioError::NonFiniteValue);
                }
            }
        }
        for p in [
            self.signaling.monitored_signal_prob,
            self.signaling.unmonitored_signal_prob,
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ScenarioError::BadProbability(p));
            }
        }
        Ok(())
    }

    fn computers(&self) -> impl Iterator<Item = &ComputerProfile> {
        self.layouts.iter().flat_map(|l| l.computers.iter())
    }

    pub fn max_reward(&self) -> f64 {
        self.computers().map(|c| c.reward).fold(f64::MIN, f64::max)
    }

    /// Default utility: 10% above the best reward in the scenario.
    pub fn default_utility(&self) -> f64 {
        self.max_reward() * 1.1
    }

    /// One linear-similarity group per attribute. Reward and penalty ranges
    /// come from the scenario data; the monitoring probability uses its
    /// natural range of 1.
    pub fn similarity_groups(&self) -> Vec<SimilarityGroup> {
        let span = |values: Vec<f64>| -> f64 {
            let min = values.iter().copied().fold(f64::MAX, f64::min);
            let max = values.iter().copied().fold(f64::MIN, f64::max);
            if max > min {
                max - min
            } else {
                1.0
            }
        };
        let reward_range = span(self.computers().map(|c| c.reward).collect());
        let penalty_range = span(self.computers().map(|c| c.penalty).collect());
        vec![
            SimilarityGroup { attrs: vec![0], function: SimilarityFn::Linear { range: reward_range } },
            SimilarityGroup { attrs: vec![1], function: SimilarityFn::Linear { range: penalty_range } },
            SimilarityGroup { attrs: vec![2], function: SimilarityFn::Linear { range: 1.0 } },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Parse(String),
    NoLayouts,
    WrongComputerCount { layout: usize, found: usize },
    BadProbability(f64),
    NonFiniteValue,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(e) => write!(f, "scenario JSON: {e}"),
            ScenarioError::NoLayouts => write!(f, "scenario has no layouts"),
            ScenarioError::WrongComputerCount { layout, found } => {
                write!(f, "layout {layout} has {found} computers, expected {COMPUTERS}")
            }
            ScenarioError::BadProbability(p) => write!(f, "probability {p} outside [0, 1]"),
            ScenarioError::NonFiniteValue => write!(f, "reward/penalty values must be finite"),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn stage1_state(c: &ComputerProfile) -> StateKey {
    StateKey::nums(&[c.reward, c.penalty, c.monitor_prob])
}

fn stage2_state(c: &ComputerProfile, signal: bool) -> StateKey {
    // The signal attribute is outside every similarity group, so stage-2
    // instances partition exactly by signal.
    StateKey::nums(&[c.reward, c.penalty, c.monitor_prob, f64::from(u8::from(signal))])
}

/// Runs one trial against the layout for this episode and returns the final
/// outcome. Consumes exactly two environment draws (monitoring, signal) and
/// two timesteps (one per decision).
pub fn run_trial(
    engine: &mut dyn Engine,
    scenario: &InsiderScenario,
    episode_index: u64,
    ctx: &mut RunContext,
    params: &AgentParams,
    streams: &AgentStreams,
    env_rng: &mut EnvRng,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> f64 {
    engine.begin_episode();
    let layout = &scenario.layouts[(episode_index % scenario.layouts.len() as u64) as usize];

    // Stage 1: pick a computer. No feedback yet; store a zero placeholder
    // that the end-of-trial credit assignment re-keys to the real outcome.
    let stage1: Vec<OptionKey> = layout
        .computers
        .iter()
        .enumerate()
        .map(|(i, c)| OptionKey::new(stage1_state(c), i as ActionId))
        .collect();
    let t1 = ctx.t;
    let choice1 = engine.choose(&stage1, t1, params, streams);
    let computer = &layout.computers[choice1.action as usize];
    engine.respond(&stage1[choice1.action as usize], 0.0, t1, false);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(StepTrace { t: t1, agent: 0, action: choice1.action, blended: choice1.blended });
    }
    ctx.t += 1;

    let monitored = env_rng.next_unit() < computer.monitor_prob;
    let signal_prob = if monitored {
        scenario.signaling.monitored_signal_prob
    } else {
        scenario.signaling.unmonitored_signal_prob
    };
    let signal = env_rng.next_unit() < signal_prob;

    // Stage 2: continue or withdraw given the signal.
    let state2 = stage2_state(computer, signal);
    let stage2 = [
        OptionKey::new(state2.clone(), CONTINUE),
        OptionKey::new(state2, WITHDRAW),
    ];
    let t2 = ctx.t;
    let choice2 = engine.choose(&stage2, t2, params, streams);
    let outcome = if choice2.action == CONTINUE {
        if monitored {
            -computer.penalty
        } else {
            computer.reward
        }
    } else {
        0.0
    };
    engine.respond(&stage2[(choice2.action - CONTINUE) as usize], outcome, t2, true);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(StepTrace { t: t2, agent: 0, action: choice2.action, blended: choice2.blended });
    }
    ctx.t += 1;
    outcome
}
