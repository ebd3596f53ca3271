//! Loop-based reference engine.
//!
//! Memory is a flat, append-only list of event records, one per occurrence.
//! Every query rescans the whole list, regroups the matching records into
//! instances with element-by-element loops, and evaluates each instance with
//! a scalar inner loop over its timestamps. Nothing is cached, indexed, or
//! kept contiguous across queries, so query cost grows with total record
//! count. That is the point: this engine is the honest slow path the
//! vectorized engine is measured against, and it must stay that way.

use indexmap::IndexMap;

use crate::key::OptionKey;
use crate::math;
use crate::memory::{MemorySnapshot, PendingStep};
use crate::params::AgentParams;
use crate::streams::AgentStreams;

use super::{pool_match, Choice, Engine};

/// One stored occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub option: OptionKey,
    pub outcome: f64,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Default)]
pub struct BaselineEngine {
    records: Vec<EventRecord>,
    pending: Vec<PendingStep>,
}

impl BaselineEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn pending(&self) -> &[PendingStep] {
        &self.pending
    }

    fn has_option(&self, option: &OptionKey) -> bool {
        self.records.iter().any(|r| r.option == *option)
    }

    /// Regroups the records matching `query` into (option, outcome,
    /// timestamps) instances. Options appear in first-record order and
    /// outcomes within an option in first-record order, which is exactly the
    /// first-insertion order the vectorized engine maintains, so instance
    /// ordinals agree across engines.
    fn gather(
        &self,
        query: &OptionKey,
        params: &AgentParams,
        grouped: &[usize],
    ) -> Vec<(OptionKey, Vec<(f64, Vec<u64>)>)> {
        let mut pool: Vec<(OptionKey, Vec<(f64, Vec<u64>)>)> = Vec::new();
        for record in &self.records {
            if !pool_match(query, &record.option, params, grouped) {
                continue;
            }
            let slot = match pool.iter().position(|(k, _)| *k == record.option) {
                Some(i) => i,
                None => {
                    pool.push((record.option.clone(), Vec::new()));
                    pool.len() - 1
                }
            };
            let entries = &mut pool[slot].1;
            let bits = record.outcome.to_bits();
            match entries.iter().position(|(x, _)| x.to_bits() == bits) {
                Some(i) => entries[i].1.push(record.timestamp),
                None => entries.push((record.outcome, vec![record.timestamp])),
            }
        }
        pool
    }
}

impl Engine for BaselineEngine {
    fn choose(
        &mut self,
        options: &[OptionKey],
        t: u64,
        params: &AgentParams,
        streams: &AgentStreams,
    ) -> Choice {
        for option in options {
            if !self.has_option(option) {
                self.records.push(EventRecord {
                    option: option.clone(),
                    outcome: params.default_utility,
                    timestamp: 0,
                });
            }
        }
        let grouped = params.grouped_indices();
        let mut blended = Vec::with_capacity(options.len());
        for option in options {
            let pool = self.gather(option, params, &grouped);
            let mut activations = Vec::new();
            let mut outcomes = Vec::new();
            let mut ordinal = 0u64;
            for (stored, entries) in &pool {
                let sim = math::similarity_term(
                    option.state.attr_slice(),
                    stored.state.attr_slice(),
                    &params.similarity_groups,
                );
                for (outcome, timestamps) in entries {
                    let xi = if params.noise > 0.0 {
                        streams.noise(t, option.action, ordinal)
                    } else {
                        0.5
                    };
                    activations.push(math::activation(timestamps, t, sim, xi, params));
                    outcomes.push(*outcome);
                    ordinal += 1;
                }
            }
            let probabilities = math::retrieval_probabilities(&activations, params.temperature);
            blended.push((option.action, math::blended_value(&probabilities, &outcomes)));
        }
        let action = math::select_action(&blended, || streams.tie_break(t));
        Choice { action, blended }
    }

    fn respond(&mut self, option: &OptionKey, outcome: f64, t: u64, delayed_trigger: bool) {
        self.records.push(EventRecord {
            option: option.clone(),
            outcome,
            timestamp: t,
        });
        self.pending.push(PendingStep {
            option: option.clone(),
            immediate_outcome: outcome,
            timestamp: t,
        });
        if delayed_trigger {
            // Equal credit by rewriting outcomes in place, scanning the
            // whole record list for the buffered timestamps.
            let mut matched = vec![false; self.pending.len()];
            for record in &mut self.records {
                for (i, step) in self.pending.iter().enumerate() {
                    if record.timestamp == step.timestamp
                        && record.outcome.to_bits() == step.immediate_outcome.to_bits()
                        && record.option == step.option
                    {
                        record.outcome = outcome;
                        matched[i] = true;
                    }
                }
            }
            assert!(
                matched.iter().all(|&m| m),
                "pending step without a matching record"
            );
            self.pending.clear();
        }
    }

    fn begin_episode(&mut self) {
        self.pending.clear();
    }

    fn snapshot(&self) -> MemorySnapshot {
        let mut grouped: IndexMap<OptionKey, IndexMap<u64, Vec<u64>>> = IndexMap::new();
        for record in &self.records {
            grouped
                .entry(record.option.clone())
                .or_default()
                .entry(record.outcome.to_bits())
                .or_default()
                .push(record.timestamp);
        }
        grouped
            .into_iter()
            .map(|(k, entries)| {
                (
                    k,
                    entries
                        .into_iter()
                        .map(|(bits, mut ts)| {
                            ts.sort_unstable();
                            (f64::from_bits(bits), ts)
                        })
                        .collect(),
                )
            })
            .collect()
    }

    fn stored_timestamps(&self) -> usize {
        self.records.len()
    }

    fn name(&self) -> &'static str {
        "baseline"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key::StateKey;

    fn opt(action: u32) -> OptionKey {
        OptionKey::new(StateKey::nums(&[]), action)
    }

    fn quiet_params() -> AgentParams {
        AgentParams::new(0.5, 0.0, 4.4).with_temperature(1.0)
    }

    #[test]
    fn singleton_record_blends_to_its_outcome() {
        let mut e = BaselineEngine::new();
        e.respond(&opt(1), 3.0, 1, false);
        let streams = AgentStreams::new(0, 0);
        let choice = e.choose(&[opt(1)], 2, &quiet_params(), &streams);
        assert_eq!(choice.action, 1);
        assert!((choice.blended[0].1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fresh_options_blend_to_default_utility() {
        let mut e = BaselineEngine::new();
        let streams = AgentStreams::new(7, 0);
        let choice = e.choose(&[opt(0), opt(1)], 1, &quiet_params(), &streams);
        for &(_, v) in &choice.blended {
            assert!((v - 4.4).abs() < 1e-12);
        }
        // Symmetric tie: both actions possible, chosen via the tie stream.
        assert!(choice.action == 0 || choice.action == 1);
    }

    #[test]
    fn delayed_trigger_rewrites_all_buffered_records() {
        let mut e = BaselineEngine::new();
        e.respond(&opt(1), -0.01, 1, false);
        e.respond(&opt(2), -0.01, 2, false);
        e.respond(&opt(1), 0.75, 3, true);
        let rewritten: Vec<f64> = e.records().iter().map(|r| r.outcome).collect();
        assert_eq!(rewritten, vec![0.75, 0.75, 0.75]);
        assert!(e.pending().is_empty());
    }

    #[test]
    fn record_count_is_steps_plus_seeded_options() {
        let mut e = BaselineEngine::new();
        let streams = AgentStreams::new(3, 0);
        let params = quiet_params();
        let _ = e.choose(&[opt(0), opt(1)], 1, &params, &streams);
        e.respond(&opt(0), 3.0, 1, false);
        let _ = e.choose(&[opt(0), opt(1)], 2, &params, &streams);
        e.respond(&opt(1), 0.0, 2, false);
        assert_eq!(e.stored_timestamps(), 2 + 2);
    }

    #[test]
    fn snapshot_groups_by_first_occurrence() {
        let mut e = BaselineEngine::new();
        e.respond(&opt(1), 3.0, 1, false);
        e.respond(&opt(2), 0.0, 2, false);
        e.respond(&opt(1), 3.0, 3, false);
        e.respond(&opt(1), 1.0, 4, false);
        let snap = e.snapshot();
        assert_eq!(snap[0].0, opt(1));
        assert_eq!(snap[0].1, vec![(3.0, vec![1, 3]), (1.0, vec![4])]);
        assert_eq!(snap[1].0, opt(2));
    }
}
