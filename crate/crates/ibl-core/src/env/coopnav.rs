//! Three-agent cooperative navigation.
//!
//! Three agents move on an open grid holding three landmarks. The collective
//! reward is the number of distinct landmarks covered by at least one agent;
//! it is paid when the episode ends, either because every agent stands on
//! its own landmark (all three covered, reward 3) or because the step limit
//! ran out (reward is the coverage at that point). A positive terminal
//! reward triggers delayed credit assignment over the episode's steps.
//!
//! Landmark and start cells are re-drawn each episode, all six distinct.
//! All agents share one observation: A1 = 240, A2 = 200, A3 = 150, L1 = 40,
//! L2 = 50, L3 = 60, with agents drawn over landmarks they stand on.

use crate::engine::Engine;
use crate::key::{ActionId, OptionKey, StateKey};
use crate::params::AgentParams;
use crate::streams::{AgentStreams, EnvRng};

use super::{EnvStep, Pos, RunContext, StepTrace, GRID_ACTIONS};

pub const DEFAULT_SIZE: usize = 10;

pub const AGENT_PIXELS: [u8; 3] = [240, 200, 150];
pub const LANDMARK_PIXELS: [u8; 3] = [40, 50, 60];

/// Number of distinct landmarks covered by at least one agent.
pub fn coopnav_reward(agents: &[Pos], landmarks: &[Pos]) -> f64 {
    landmarks
        .iter()
        .filter(|lm| agents.iter().any(|a| a == *lm))
        .count() as f64
}

#[derive(Debug, Clone)]
pub struct CoopNavEnv {
    size: usize,
    landmarks: [Pos; 3],
    agents: [Pos; 3],
    step_limit: u64,
    steps: u64,
    done: bool,
}

impl CoopNavEnv {
    pub fn new(size: usize, step_limit: u64, env_rng: &mut EnvRng) -> Self {
        assert!(size * size >= 6, "grid too small for 6 distinct cells");
        let mut env = Self {
            size,
            landmarks: [Pos::new(0, 0); 3],
            agents: [Pos::new(0, 0); 3],
            step_limit,
            steps: 0,
            done: false,
        };
        env.reset(env_rng);
        env
    }

    /// Draws six distinct cells (three landmarks, three starts) with a
    /// partial shuffle, consuming exactly six environment draws.
    pub fn reset(&mut self, env_rng: &mut EnvRng) {
        let n = self.size * self.size;
        let mut cells: Vec<usize> = (0..n).collect();
        for i in 0..6 {
            let j = i + env_rng.next_below((n - i) as u64) as usize;
            cells.swap(i, j);
        }
        let pos = |idx: usize| Pos::new(idx % self.size, idx / self.size);
        self.landmarks = [pos(cells[0]), pos(cells[1]), pos(cells[2])];
        self.agents = [pos(cells[3]), pos(cells[4]), pos(cells[5])];
        self.steps = 0;
        self.done = false;
    }

    pub fn landmarks(&self) -> &[Pos; 3] {
        &self.landmarks
    }

    pub fn agents(&self) -> &[Pos; 3] {
        &self.agents
    }

    pub fn observation(&self) -> Vec<u8> {
        let mut obs = vec![0u8; self.size * self.size];
        for (i, lm) in self.landmarks.iter().enumerate() {
            obs[lm.y * self.size + lm.x] = LANDMARK_PIXELS[i];
        }
        for (i, a) in self.agents.iter().enumerate() {
            obs[a.y * self.size + a.x] = AGENT_PIXELS[i];
        }
        obs
    }

    /// Every landmark covered and every agent on a landmark: with three of
    /// each, that is one agent per landmark.
    fn fully_covered(&self) -> bool {
        self.landmarks
            .iter()
            .all(|lm| self.agents.iter().any(|a| a == lm))
            && self
                .agents
                .iter()
                .all(|a| self.landmarks.iter().any(|lm| lm == a))
    }

    pub fn step(&mut self, actions: [ActionId; 3]) -> EnvStep {
        assert!(!self.done, "episode is over; reset before stepping");
        self.steps += 1;
        for (i, &action) in actions.iter().enumerate() {
            if let Some(pos) = self.agents[i].moved(action, self.size, self.size) {
                self.agents[i] = pos;
            }
        }
        if self.fully_covered() {
            self.done = true;
            return EnvStep { reward: 3.0, delayed: true, done: true };
        }
        if self.steps >= self.step_limit {
            self.done = true;
            let reward = coopnav_reward(&self.agents, &self.landmarks);
            return EnvStep { reward, delayed: reward > 0.0, done: true };
        }
        EnvStep { reward: 0.0, delayed: false, done: false }
    }
}

/// Runs one episode with one engine per agent and returns the collective
/// reward.
pub fn run_episode(
    engines: &mut [Box<dyn Engine>],
    env: &mut CoopNavEnv,
    ctx: &mut RunContext,
    params: &AgentParams,
    streams: &[AgentStreams],
    env_rng: &mut EnvRng,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> f64 {
    assert_eq!(engines.len(), 3);
    for engine in engines.iter_mut() {
        engine.begin_episode();
    }
    env.reset(env_rng);
    let mut collected = 0.0;
    loop {
        let t = ctx.t;
        // One shared observation; each agent still keys its own memory.
        let state = StateKey::digest_of(&env.observation());
        let options: Vec<OptionKey> = GRID_ACTIONS
            .iter()
            .map(|&a| OptionKey::new(state.clone(), a))
            .collect();
        let mut actions = [0; 3];
        for agent in 0..3 {
            let choice = engines[agent].choose(&options, t, params, &streams[agent]);
            actions[agent] = choice.action;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(StepTrace {
                    t,
                    agent: agent as u32,
                    action: choice.action,
                    blended: choice.blended,
                });
            }
        }
        let step = env.step(actions);
        for agent in 0..3 {
            engines[agent].respond(
                &options[actions[agent] as usize],
                step.reward,
                t,
                step.delayed,
            );
        }
        collected += step.reward;
        ctx.t += 1;
        if step.done {
            return collected;
        }
    }
}
