//! Search-and-rescue gridworld.
//!
//! A single agent walks a walled building rescuing yellow (+0.75) and green
//! (+0.25) victims; bumping a wall costs 0.05 and moving through an empty
//! cell costs 0.01. A rescue triggers delayed credit assignment over the
//! steps since the previous rescue. The episode ends when every victim is
//! rescued or the step limit is reached; a reset puts every victim back and
//! returns the agent to the start cell.
//!
//! The observation is a byte grid over the whole map: 240 at the agent, 150
//! at yellow victims, 200 at green victims, 100 at walls, 0 elsewhere. Its
//! digest is the state key (partial matching is off for this task).

use crate::engine::Engine;
use crate::key::{OptionKey, StateKey};
use crate::params::AgentParams;
use crate::streams::AgentStreams;

use super::{Cell, EnvStep, GridMap, MapError, Pos, RunContext, StepTrace, GRID_ACTIONS};

pub const YELLOW_REWARD: f64 = 0.75;
pub const GREEN_REWARD: f64 = 0.25;
pub const WALL_PENALTY: f64 = -0.05;
pub const EMPTY_PENALTY: f64 = -0.01;

pub const PIXEL_AGENT: u8 = 240;
pub const PIXEL_YELLOW: u8 = 150;
pub const PIXEL_GREEN: u8 = 200;
pub const PIXEL_WALL: u8 = 100;

pub const DEFAULT_MAP: &str = include_str!("../../assets/minimap_default.map");
pub const MINI_MAP: &str = include_str!("../../assets/minimap_mini.map");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Victim {
    Green,
    Yellow,
}

#[derive(Debug, Clone)]
pub struct MinimapEnv {
    width: usize,
    height: usize,
    walls: Vec<bool>,
    start: Pos,
    initial_victims: Vec<(usize, Victim)>,
    victims: Vec<Option<Victim>>,
    base_obs: Vec<u8>,
    agent: Pos,
    rescued: usize,
    step_limit: u64,
    steps: u64,
    done: bool,
}

impl MinimapEnv {
    pub fn from_map(map: &GridMap, step_limit: u64) -> Result<Self, MapError> {
        let mut walls = vec![false; map.width * map.height];
        let mut initial_victims = Vec::new();
        let mut start = None;
        for y in 0..map.height {
            for x in 0..map.width {
                let pos = Pos::new(x, y);
                let idx = y * map.width + x;
                match map.cell(pos) {
                    Cell::Wall => walls[idx] = true,
                    Cell::GreenVictim => initial_victims.push((idx, Victim::Green)),
                    Cell::YellowVictim => initial_victims.push((idx, Victim::Yellow)),
                    Cell::Start => {
                        if start.replace(pos).is_some() {
                            return Err(MapError::Validation(
                                "minimap needs exactly one start cell".into(),
                            ));
                        }
                    }
                    Cell::Empty => {}
                    other => {
                        return Err(MapError::Validation(format!(
                            "cell {other:?} not valid on a minimap"
                        )))
                    }
                }
            }
        }
        let start = start
            .ok_or_else(|| MapError::Validation("minimap needs a start cell".into()))?;
        if initial_victims.is_empty() {
            return Err(MapError::Validation("minimap has no victims".into()));
        }
        let mut env = Self {
            width: map.width,
            height: map.height,
            walls,
            start,
            initial_victims,
            victims: Vec::new(),
            base_obs: Vec::new(),
            agent: start,
            rescued: 0,
            step_limit,
            steps: 0,
            done: false,
        };
        env.reset();
        Ok(env)
    }

    pub fn default_env(step_limit: u64) -> Self {
        Self::from_map(&GridMap::parse(DEFAULT_MAP).unwrap(), step_limit)
            .expect("built-in map is valid")
    }

    /// Restores every victim to where it was rescued from and puts the agent
    /// back on the start cell.
    pub fn reset(&mut self) {
        self.victims = vec![None; self.width * self.height];
        for &(idx, v) in &self.initial_victims {
            self.victims[idx] = Some(v);
        }
        self.base_obs = vec![0; self.width * self.height];
        for i in 0..self.base_obs.len() {
            if self.walls[i] {
                self.base_obs[i] = PIXEL_WALL;
            } else if let Some(v) = self.victims[i] {
                self.base_obs[i] = match v {
                    Victim::Green => PIXEL_GREEN,
                    Victim::Yellow => PIXEL_YELLOW,
                };
            }
        }
        self.agent = self.start;
        self.rescued = 0;
        self.steps = 0;
        self.done = false;
    }

    pub fn observation(&self) -> Vec<u8> {
        let mut obs = self.base_obs.clone();
        obs[self.agent.y * self.width + self.agent.x] = PIXEL_AGENT;
        obs
    }

    pub fn step(&mut self, action: u32) -> EnvStep {
        assert!(!self.done, "episode is over; reset before stepping");
        self.steps += 1;
        let target = self.agent.moved(action, self.width, self.height);
        let (reward, delayed) = match target {
            None => (WALL_PENALTY, false),
            Some(pos) => {
                let idx = pos.y * self.width + pos.x;
                if self.walls[idx] {
                    (WALL_PENALTY, false)
                } else {
                    self.agent = pos;
                    match self.victims[idx].take() {
                        Some(v) => {
                            self.rescued += 1;
                            self.base_obs[idx] = 0;
                            let reward = match v {
                                Victim::Green => GREEN_REWARD,
                                Victim::Yellow => YELLOW_REWARD,
                            };
                            (reward, true)
                        }
                        None => (EMPTY_PENALTY, false),
                    }
                }
            }
        };
        if self.rescued == self.initial_victims.len() || self.steps >= self.step_limit {
            self.done = true;
        }
        EnvStep { reward, delayed, done: self.done }
    }

    pub fn total_victims(&self) -> usize {
        self.initial_victims.len()
    }

    pub fn rescued(&self) -> usize {
        self.rescued
    }

    pub fn victims_remaining(&self) -> usize {
        self.victims.iter().filter(|v| v.is_some()).count()
    }
}

/// Runs one episode and returns the collected reward.
pub fn run_episode(
    engine: &mut dyn Engine,
    env: &mut MinimapEnv,
    ctx: &mut RunContext,
    params: &AgentParams,
    streams: &AgentStreams,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> f64 {
    engine.begin_episode();
    env.reset();
    let mut collected = 0.0;
    loop {
        let state = StateKey::digest_of(&env.observation());
        let options: Vec<OptionKey> = GRID_ACTIONS
            .iter()
            .map(|&a| OptionKey::new(state.clone(), a))
            .collect();
        let t = ctx.t;
        let choice = engine.choose(&options, t, params, streams);
        let step = env.step(choice.action);
        engine.respond(
            &options[choice.action as usize],
            step.reward,
            t,
            step.delayed,
        );
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(StepTrace { t, agent: 0, action: choice.action, blended: choice.blended });
        }
        collected += step.reward;
        ctx.t += 1;
        if step.done {
            return collected;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MinimapEnv {
        let map = GridMap::parse("5 4\n#####\n#Sy.#\n#.g.#\n#####\n").unwrap();
        MinimapEnv::from_map(&map, 100).unwrap()
    }

    #[test]
    fn rescue_rewards_and_delayed_flags() {
        let mut env = tiny();
        let step = env.step(super::super::RIGHT); // (2,1): yellow victim
        assert_eq!(step.reward, YELLOW_REWARD);
        assert!(step.delayed);
        let step = env.step(super::super::RIGHT); // (3,1): empty
        assert_eq!(step.reward, EMPTY_PENALTY);
        assert!(!step.delayed);
        let step = env.step(super::super::DOWN); // (3,2): empty
        assert_eq!(step.reward, EMPTY_PENALTY);
        let step = env.step(super::super::DOWN); // wall row
        assert_eq!(step.reward, WALL_PENALTY);
        assert!(!step.delayed);
    }

    #[test]
    fn wall_bump_does_not_move_the_agent() {
        let mut env = tiny();
        let before = env.observation();
        let step = env.step(super::super::UP);
        assert_eq!(step.reward, WALL_PENALTY);
        assert_eq!(env.observation(), before);
    }

    #[test]
    fn victim_conservation_and_reset() {
        let mut env = tiny();
        assert_eq!(env.total_victims(), 2);
        env.step(super::super::RIGHT);
        assert_eq!(env.rescued() + env.victims_remaining(), env.total_victims());
        env.reset();
        assert_eq!(env.victims_remaining(), 2);
        assert_eq!(env.rescued(), 0);
    }

    #[test]
    fn episode_ends_when_all_victims_rescued() {
        let mut env = tiny();
        let step = env.step(super::super::RIGHT); // (2,1): yellow
        assert!(!step.done);
        let step = env.step(super::super::DOWN); // (2,2): green, last victim
        assert_eq!(step.reward, GREEN_REWARD);
        assert!(step.done);
        assert_eq!(env.victims_remaining(), 0);
    }

    #[test]
    fn observation_pixels() {
        let env = tiny();
        let obs = env.observation();
        assert_eq!(obs[1 * 5 + 1], PIXEL_AGENT);
        assert_eq!(obs[1 * 5 + 2], PIXEL_YELLOW);
        assert_eq!(obs[2 * 5 + 2], PIXEL_GREEN);
        assert_eq!(obs[0], PIXEL_WALL);
        assert_eq!(obs[1 * 5 + 3], 0);
    }

    #[test]
    fn default_map_has_the_published_counts() {
        let map = GridMap::parse(DEFAULT_MAP).unwrap();
        assert_eq!(map.width, 93);
        assert_eq!(map.height, 50);
        let env = MinimapEnv::from_map(&map, 2500).unwrap();
        assert_eq!(env.total_victims(), 34);
        let greens = env
            .initial_victims
            .iter()
            .filter(|(_, v)| *v == Victim::Green)
            .count();
        assert_eq!(greens, 24);
        assert_eq!(env.total_victims() - greens, 10);
    }

    #[test]
    fn mini_map_loads() {
        let map = GridMap::parse(MINI_MAP).unwrap();
        assert_eq!((map.width, map.height), (10, 10));
        MinimapEnv::from_map(&map, 200).unwrap();
    }
}
