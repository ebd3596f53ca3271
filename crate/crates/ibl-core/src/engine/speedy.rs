//! Vectorized engine.
//!
//! Memory is the nested option -> outcome -> timestamp-array dictionary.
//! Each instance keeps its occurrence timestamps in one growable contiguous
//! array, so the base-level term is a bulk subtract/power/sum over that
//! array, retrieval probabilities are a bulk exponentiation over the
//! activation array, and blending is an elementwise product-sum. Query cost
//! is proportional to the instances of the options being evaluated, never to
//! total memory size.

use crate::key::OptionKey;
use crate::math::{logistic_noise, select_action, similarity_term};
use crate::memory::{InstanceStore, MemorySnapshot};
use crate::params::AgentParams;
use crate::streams::AgentStreams;

use super::{pool_match, Choice, Engine};

/// Base-level term over one contiguous timestamp array:
/// `ln(sum(pow(t - T, -d)))` as elementwise lag, power, and sum.
pub fn speedy_base_level(timestamps: &[u64], t: u64, decay: f64) -> f64 {
    assert!(!timestamps.is_empty(), "instance with no occurrences");
    timestamps
        .iter()
        .map(|&stamp| {
            debug_assert!(stamp < t);
            ((t - stamp) as f64).powf(-decay)
        })
        .sum::<f64>()
        .ln()
}

/// Retrieval probabilities `v / sum(v)` with `v = exp(activations / tau)`,
/// computed over the whole activation array (max-shifted for stability).
pub fn speedy_probabilities(activations: &[f64], temperature: f64) -> Vec<f64> {
    assert!(!activations.is_empty(), "no instances to retrieve from");
    assert!(temperature > 0.0, "temperature must be positive");
    let max = activations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut v: Vec<f64> = activations
        .iter()
        .map(|&a| ((a - max) / temperature).exp())
        .collect();
    let sum: f64 = v.iter().sum();
    for p in &mut v {
        *p /= sum;
    }
    v
}

/// Blended value `sum(x * P)` over the outcome and probability arrays.
pub fn speedy_blend(outcomes: &[f64], probabilities: &[f64]) -> f64 {
    assert_eq!(outcomes.len(), probabilities.len());
    outcomes
        .iter()
        .zip(probabilities)
        .map(|(x, p)| p * x)
        .sum()
}

#[derive(Debug, Clone, Default)]
pub struct SpeedyEngine {
    store: InstanceStore,
}

impl SpeedyEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn store(&self) -> &InstanceStore {
        &self.store
    }

    /// Evaluates one option: gathers its eligible instances in first-insertion
    /// order and applies the bulk activation/probability/blend pipeline.
    fn evaluate(
        &self,
        option: &OptionKey,
        t: u64,
        params: &AgentParams,
        streams: &AgentStreams,
        grouped: &[usize],
    ) -> f64 {
        let mut activations = Vec::new();
        let mut outcomes = Vec::new();
        let mut ordinal = 0u64;
        let mut eval_instances = |stored: &OptionKey, instances: &crate::memory::OptionInstances| {
            let sim = similarity_term(
                option.state.attr_slice(),
                stored.state.attr_slice(),
                &params.similarity_groups,
            );
            for (outcome, timestamps) in instances.iter() {
                let xi = if params.noise > 0.0 {
                    streams.noise(t, option.action, ordinal)
                } else {
                    0.5
                };
                activations.push(
                    speedy_base_level(timestamps, t, params.decay)
                        + params.mismatch_penalty * sim
                        + logistic_noise(params.noise, xi),
                );
                outcomes.push(outcome);
                ordinal += 1;
            }
        };
        if params.partial_matching() {
            for (stored, instances) in self.store.iter_options() {
                if pool_match(option, stored, params, grouped) {
                    eval_instances(stored, instances);
                }
            }
        } else {
            let instances = self
                .store
                .instances(option)
                .expect("option seeded before evaluation");
            eval_instances(option, instances);
        }
        let probabilities = speedy_probabilities(&activations, params.temperature);
        speedy_blend(&outcomes, &probabilities)
    }
}

impl Engine for SpeedyEngine {
    fn choose(
        &mut self,
        options: &[OptionKey],
        t: u64,
        params: &AgentParams,
        streams: &AgentStreams,
    ) -> Choice {
        for option in options {
            if !self.store.contains(option) {
                self.store.prepopulate(option.clone(), params.default_utility);
            }
        }
        let grouped = params.grouped_indices();
        let blended: Vec<_> = options
            .iter()
            .map(|option| {
                (
                    option.action,
                    self.evaluate(option, t, params, streams, &grouped),
                )
            })
            .collect();
        let action = select_action(&blended, || streams.tie_break(t));
        Choice { action, blended }
    }

    fn respond(&mut self, option: &OptionKey, outcome: f64, t: u64, delayed_trigger: bool) {
        self.store.record(option.clone(), outcome, t);
        if delayed_trigger {
            self.store.equal_credit(outcome);
        }
    }

    fn begin_episode(&mut self) {
        self.store.begin_episode();
    }

    fn snapshot(&self) -> MemorySnapshot {
        self.store.snapshot()
    }

    fn stored_timestamps(&self) -> usize {
        self.store.total_timestamps()
    }

    fn name(&self) -> &'static str {
        "speedy"
    }
}
