//! Repeated binary choice between a safe and a risky option.
//!
//! The safe option pays a fixed 3; the risky option pays 4 with probability
//! 0.8 and 0 otherwise, so the risky option maximizes expected value (3.2
//! vs 3.0). One trial per episode, no delayed feedback.

use crate::engine::Engine;
use crate::key::{ActionId, OptionKey, StateKey};
use crate::params::AgentParams;
use crate::streams::{AgentStreams, EnvRng};

use super::{RunContext, StepTrace};

pub const SAFE: ActionId = 0;
pub const RISKY: ActionId = 1;

pub const SAFE_OUTCOME: f64 = 3.0;
pub const RISKY_HIGH: f64 = 4.0;
pub const RISKY_LOW: f64 = 0.0;
pub const RISKY_HIGH_PROB: f64 = 0.8;

/// Payoff of one trial. Only the risky arm consumes an environment draw.
pub fn binary_step(action: ActionId, env_rng: &mut EnvRng) -> f64 {
    match action {
        SAFE => SAFE_OUTCOME,
        RISKY => {
            if env_rng.next_unit() < RISKY_HIGH_PROB {
                RISKY_HIGH
            } else {
                RISKY_LOW
            }
        }
        other => panic!("unknown binary-choice action {other}"),
    }
}

/// Runs one trial and returns 1.0 when the maximum-expectation (risky)
/// option was chosen, the per-trial PMax indicator.
pub fn run_episode(
    engine: &mut dyn Engine,
    ctx: &mut RunContext,
    params: &AgentParams,
    streams: &AgentStreams,
    env_rng: &mut EnvRng,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> f64 {
    engine.begin_episode();
    let state = StateKey::nums(&[]);
    let options = [
        OptionKey::new(state.clone(), SAFE),
        OptionKey::new(state, RISKY),
    ];
    let t = ctx.t;
    let choice = engine.choose(&options, t, params, streams);
    let reward = binary_step(choice.action, env_rng);
    let chosen = options[choice.action as usize].clone();
    engine.respond(&chosen, reward, t, false);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(StepTrace { t, agent: 0, action: choice.action, blended: choice.blended });
    }
    ctx.t += 1;
    f64::from(choice.action == RISKY)
}
