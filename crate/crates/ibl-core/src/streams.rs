//! Named, reproducible random streams.
//!
//! Draws are counter-based rather than sequential: every value is a pure
//! function of a fully-specified key, so the two engines can evaluate
//! instances in different code paths and still see bit-identical noise for
//! the same (timestep, option, instance) coordinate. Keys never collide
//! across the three stream kinds, across agents, or across runs.
//!
//! Generation is a chained SplitMix64 finalizer over the key words; this is
//! not cryptographic, just statistically clean and platform-stable.

use crate::key::ActionId;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    AgentNoise = 1,
    TieBreak = 2,
    Environment = 3,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn chain(words: &[u64]) -> u64 {
    let mut h = GAMMA;
    for &w in words {
        h = mix64(h ^ w).wrapping_add(GAMMA);
    }
    mix64(h)
}

/// Maps 64 random bits onto the open interval (0, 1): the top 52 bits are
/// centered on half-steps of the 2^-52 lattice. Both endpoints are exactly
/// representable and strictly inside (0, 1), so `ln((1-x)/x)` is always
/// finite. (53 bits would round the top lattice point up to 1.0.)
#[inline]
fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}

/// Seed for one run, derived from the experiment master seed so that runs
/// are independent but reproducible, and identical for both engines.
pub fn run_seed(master_seed: u64, run_index: u64) -> u64 {
    chain(&[master_seed, 0x5eed, run_index])
}

/// Per-agent noise and tie-break streams.
#[derive(Debug, Clone, Copy)]
pub struct AgentStreams {
    pub run_seed: u64,
    pub agent_id: u64,
}

impl AgentStreams {
    pub fn new(run_seed: u64, agent_id: u64) -> Self {
        Self { run_seed, agent_id }
    }

    /// Activation noise draw in (0, 1), one per (timestep, option, instance).
    /// The option coordinate is the action id, which is unique among the
    /// options evaluated in a step; the instance coordinate is the instance
    /// ordinal in first-insertion order.
    #[inline]
    pub fn noise(&self, t: u64, action: ActionId, instance_ordinal: u64) -> f64 {
        unit_open(chain(&[
            self.run_seed,
            StreamKind::AgentNoise as u64,
            self.agent_id,
            t,
            u64::from(action),
            instance_ordinal,
        ]))
    }

    /// Tie-break draw in (0, 1), one per timestep, consumed only when the
    /// maximum blended value is attained by more than one action.
    #[inline]
    pub fn tie_break(&self, t: u64) -> f64 {
        unit_open(chain(&[
            self.run_seed,
            StreamKind::TieBreak as u64,
            self.agent_id,
            t,
        ]))
    }
}

/// Sequential environment stream. Engines never touch this stream, so the
/// number of draws an episode consumes does not depend on the engine.
#[derive(Debug, Clone)]
pub struct EnvRng {
    run_seed: u64,
    counter: u64,
}

impl EnvRng {
    pub fn for_run(run_seed: u64) -> Self {
        Self { run_seed, counter: 0 }
    }

    #[inline]
    fn next_bits(&mut self) -> u64 {
        let c = self.counter;
        self.counter += 1;
        chain(&[self.run_seed, StreamKind::Environment as u64, c])
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_open(self.next_bits())
    }

    /// Uniform integer in `0..n`.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((u128::from(self.next_bits()) * u128::from(n)) >> 64) as u64
    }

    /// Number of draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }
}
