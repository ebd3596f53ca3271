//! Two-agent firefighting coordination task.
//!
//! Both agents pick up one firefighting item each by walking onto an
//! equipment cell, then navigate to the fire. The episode completes when
//! both agents stand on the fire cell carrying items, paying a collective
//! reward from the item-match payoff matrix:
//!
//! ```text
//!            E1    E2    E3      (agent 2)
//!     E1     11   -30     0
//!     E2    -30  14/0     6
//!     E3      0     0     5
//! (agent 1)
//! ```
//!
//! The (E2, E2) entry pays 14 with probability 0.5 and 0 otherwise. The fire
//! moves to a fresh uniformly-drawn empty cell every episode; agents restart
//! from their fixed start cells.
//!
//! Each agent observes a byte grid with itself (A1 = 240, A2 = 200), the
//! fire (55), the equipment (E1 = 40, E2 = 50, E3 = 60), and walls (100);
//! the other agent is invisible.

use crate::engine::Engine;
use crate::key::{ActionId, OptionKey, StateKey};
use crate::params::AgentParams;
use crate::streams::{AgentStreams, EnvRng};

use super::{Cell, EnvStep, GridMap, MapError, Pos, RunContext, StepTrace, GRID_ACTIONS};

pub const PIXEL_AGENT1: u8 = 240;
pub const PIXEL_AGENT2: u8 = 200;
pub const PIXEL_FIRE: u8 = 55;
pub const PIXEL_WALL: u8 = 100;

pub const DEFAULT_MAP: &str = include_str!("../../assets/fireman_default.map");

pub fn equipment_pixel(item: u8) -> u8 {
    match item {
        1 => 40,
        2 => 50,
        3 => 60,
        other => panic!("unknown equipment id {other}"),
    }
}

/// Collective payoff for the picked item pair.
pub fn fireman_payoff(item_a: u8, item_b: u8, env_rng: &mut EnvRng) -> f64 {
    match (item_a, item_b) {
        (1, 1) => 11.0,
        (1, 2) | (2, 1) => -30.0,
        (1, 3) | (3, 1) => 0.0,
        (2, 2) => {
            if env_rng.next_unit() < 0.5 {
                14.0
            } else {
                0.0
            }
        }
        (2, 3) => 6.0,
        (3, 2) => 0.0,
        (3, 3) => 5.0,
        other => panic!("unknown equipment pair {other:?}"),
    }
}

#[derive(Debug, Clone)]
pub struct FiremanEnv {
    width: usize,
    height: usize,
    walls: Vec<bool>,
    equipment: Vec<(Pos, u8)>,
    starts: [Pos; 2],
    spawn_cells: Vec<Pos>,
    fire: Pos,
    agents: [Pos; 2],
    items: [Option<u8>; 2],
    step_limit: u64,
    steps: u64,
    done: bool,
}

impl FiremanEnv {
    pub fn from_map(map: &GridMap, step_limit: u64) -> Result<Self, MapError> {
        let mut walls = vec![false; map.width * map.height];
        let mut equipment = Vec::new();
        let mut starts = Vec::new();
        for y in 0..map.height {
            for x in 0..map.width {
                let pos = Pos::new(x, y);
                match map.cell(pos) {
                    Cell::Wall => walls[y * map.width + x] = true,
                    Cell::Item(id) => equipment.push((pos, id)),
                    Cell::Start => starts.push(pos),
                    Cell::Empty | Cell::FireSpawn => {}
                    other => {
                        return Err(MapError::Validation(format!(
                            "cell {other:?} not valid on a fireman map"
                        )))
                    }
                }
            }
        }
        if starts.len() != 2 {
            return Err(MapError::Validation(format!(
                "fireman needs exactly 2 start cells, found {}",
                starts.len()
            )));
        }
        let mut ids: Vec<u8> = equipment.iter().map(|&(_, id)| id).collect();
        ids.sort_unstable();
        if ids != [1, 2, 3] {
            return Err(MapError::Validation(
                "fireman needs equipment cells 1, 2 and 3 exactly once each".into(),
            ));
        }
        // Fire spawns on the marked region when present, otherwise on any
        // empty cell.
        let mut spawn_cells = map.positions_where(|c| c == Cell::FireSpawn);
        if spawn_cells.is_empty() {
            spawn_cells = map.positions_where(|c| c == Cell::Empty);
        }
        if spawn_cells.is_empty() {
            return Err(MapError::Validation("no cell for the fire to spawn on".into()));
        }
        Ok(Self {
            width: map.width,
            height: map.height,
            walls,
            equipment,
            starts: [starts[0], starts[1]],
            fire: spawn_cells[0],
            spawn_cells,
            agents: [starts[0], starts[1]],
            items: [None, None],
            step_limit,
            steps: 0,
            done: false,
        })
    }

    pub fn default_env(step_limit: u64) -> Self {
        Self::from_map(&GridMap::parse(DEFAULT_MAP).unwrap(), step_limit)
            .expect("built-in map is valid")
    }

    pub fn reset(&mut self, env_rng: &mut EnvRng) {
        self.fire = self.spawn_cells[env_rng.next_below(self.spawn_cells.len() as u64) as usize];
        self.agents = self.starts;
        self.items = [None, None];
        self.steps = 0;
        self.done = false;
    }

    pub fn fire(&self) -> Pos {
        self.fire
    }

    pub fn items(&self) -> [Option<u8>; 2] {
        self.items
    }

    pub fn observation(&self, agent: usize) -> Vec<u8> {
        let mut obs = vec![0u8; self.width * self.height];
        for (i, &w) in self.walls.iter().enumerate() {
            if w {
                obs[i] = PIXEL_WALL;
            }
        }
        for &(pos, id) in &self.equipment {
            obs[pos.y * self.width + pos.x] = equipment_pixel(id);
        }
        obs[self.fire.y * self.width + self.fire.x] = PIXEL_FIRE;
        let own = self.agents[agent];
        obs[own.y * self.width + own.x] = if agent == 0 { PIXEL_AGENT1 } else { PIXEL_AGENT2 };
        obs
    }

    /// Applies both agents' moves simultaneously from the pre-step state.
    /// Co-occupancy is allowed.
    pub fn step(&mut self, actions: [ActionId; 2], env_rng: &mut EnvRng) -> EnvStep {
        assert!(!self.done, "episode is over; reset before stepping");
        self.steps += 1;
        for (i, &action) in actions.iter().enumerate() {
            if let Some(pos) = self.agents[i].moved(action, self.width, self.height) {
                if !self.walls[pos.y * self.width + pos.x] {
                    self.agents[i] = pos;
                }
            }
            if self.items[i].is_none() {
                if let Some(&(_, id)) = self
                    .equipment
                    .iter()
                    .find(|&&(pos, _)| pos == self.agents[i])
                {
                    self.items[i] = Some(id);
                }
            }
        }
        let extinguished = self.items[0].is_some()
            && self.items[1].is_some()
            && self.agents[0] == self.fire
            && self.agents[1] == self.fire;
        if extinguished {
            self.done = true;
            let reward = fireman_payoff(self.items[0].unwrap(), self.items[1].unwrap(), env_rng);
            return EnvStep { reward, delayed: true, done: true };
        }
        if self.steps >= self.step_limit {
            self.done = true;
        }
        EnvStep { reward: 0.0, delayed: false, done: self.done }
    }
}

/// Runs one episode with one engine per agent and returns the collective
/// reward.
pub fn run_episode(
    engines: &mut [Box<dyn Engine>],
    env: &mut FiremanEnv,
    ctx: &mut RunContext,
    params: &AgentParams,
    streams: &[AgentStreams],
    env_rng: &mut EnvRng,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> f64 {
    assert_eq!(engines.len(), 2);
    for engine in engines.iter_mut() {
        engine.begin_episode();
    }
    env.reset(env_rng);
    let mut collected = 0.0;
    loop {
        let t = ctx.t;
        let mut actions = [0; 2];
        let mut options_per_agent = Vec::with_capacity(2);
        for agent in 0..2 {
            let state = StateKey::digest_of(&env.observation(agent));
            let options: Vec<OptionKey> = GRID_ACTIONS
                .iter()
                .map(|&a| OptionKey::new(state.clone(), a))
                .collect();
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
            options_per_agent.push(options);
        }
        let step = env.step(actions, env_rng);
        for agent in 0..2 {
            engines[agent].respond(
                &options_per_agent[agent][actions[agent] as usize],
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
