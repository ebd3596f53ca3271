//! The nested instance dictionary: option -> outcome -> occurrence
//! timestamps, plus the pending-step buffer for delayed credit assignment.
//!
//! Outcome entries within an option keep first-insertion order; that order
//! defines the instance ordinals the noise stream is keyed on, so it must be
//! reproducible from the interaction history alone.

use indexmap::IndexMap;

use crate::key::OptionKey;

/// One instance in its dictionary form: an option, an outcome, and every
/// timestep at which that (option, outcome) pair was observed.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceEntry {
    pub option: OptionKey,
    pub outcome: f64,
    pub timestamps: Vec<u64>,
}

/// One not-yet-credited step: the option taken, the outcome stored at the
/// time, and the step's timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingStep {
    pub option: OptionKey,
    pub immediate_outcome: f64,
    pub timestamp: u64,
}

/// Ordered view of an entire memory: options in first-insertion order, each
/// with its (outcome, timestamps) entries in first-insertion order. Both
/// engines reduce to this form, which makes cross-engine comparison and
/// ordinal derivation order-sensitive.
pub type MemorySnapshot = Vec<(OptionKey, Vec<(f64, Vec<u64>)>)>;

/// Instance ordinals for one option of a snapshot: the option's insertion
/// position and one ordinal per (outcome) entry in insertion order.
pub fn ordinals_for(snapshot: &MemorySnapshot, option: &OptionKey) -> Option<(usize, Vec<usize>)> {
    snapshot
        .iter()
        .position(|(k, _)| k == option)
        .map(|pos| (pos, (0..snapshot[pos].1.len()).collect()))
}

/// Outcome entries of one option, keyed bitwise on the outcome value.
#[derive(Debug, Clone, Default)]
pub struct OptionInstances {
    entries: Vec<(u64, Vec<u64>)>,
}

impl OptionInstances {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in first-insertion order as (outcome, timestamps).
    pub fn iter(&self) -> impl Iterator<Item = (f64, &[u64])> {
        self.entries
            .iter()
            .map(|(bits, ts)| (f64::from_bits(*bits), ts.as_slice()))
    }

    fn find(&self, outcome_bits: u64) -> Option<usize> {
        self.entries.iter().position(|(b, _)| *b == outcome_bits)
    }

    fn append(&mut self, outcome: f64, t: u64) {
        let bits = outcome.to_bits();
        match self.find(bits) {
            Some(i) => {
                let ts = &mut self.entries[i].1;
                assert!(
                    ts.last().is_none_or(|&last| last < t),
                    "timestamps must be appended in increasing order"
                );
                ts.push(t);
            }
            None => self.entries.push((bits, vec![t])),
        }
    }
}

/// Memory dictionary plus pending buffer. The vectorized engine queries this
/// structure directly; it also serves as the reference for the credit
/// assignment contract.
#[derive(Debug, Clone, Default)]
pub struct InstanceStore {
    options: IndexMap<OptionKey, OptionInstances>,
    pending: Vec<PendingStep>,
}

impl InstanceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, option: &OptionKey) -> bool {
        self.options.contains_key(option)
    }

    pub fn instances(&self, option: &OptionKey) -> Option<&OptionInstances> {
        self.options.get(option)
    }

    /// Options in first-insertion order.
    pub fn iter_options(&self) -> impl Iterator<Item = (&OptionKey, &OptionInstances)> {
        self.options.iter()
    }

    pub fn option_count(&self) -> usize {
        self.options.len()
    }

    pub fn pending(&self) -> &[PendingStep] {
        &self.pending
    }

    /// Total number of stored occurrence timestamps.
    pub fn total_timestamps(&self) -> usize {
        self.options
            .values()
            .map(|o| o.entries.iter().map(|(_, ts)| ts.len()).sum::<usize>())
            .sum()
    }

    /// Seeds a never-tried option with the default utility at timestamp 0.
    /// The seeded entry decays and blends like any observed instance.
    pub fn prepopulate(&mut self, option: OptionKey, default_utility: f64) {
        assert!(
            !self.contains(&option),
            "prepopulate called for an option that already has entries"
        );
        let mut inst = OptionInstances::default();
        inst.entries.push((default_utility.to_bits(), vec![0]));
        self.options.insert(option, inst);
    }

    /// Stores timestep `t` under (option, outcome) and buffers the step for
    /// later credit assignment.
    pub fn record(&mut self, option: OptionKey, outcome: f64, t: u64) {
        self.options
            .entry(option.clone())
            .or_default()
            .append(outcome, t);
        self.pending.push(PendingStep {
            option,
            immediate_outcome: outcome,
            timestamp: t,
        });
    }

    /// Equal credit assignment: every buffered step's timestamp moves from
    /// its immediate-outcome entry to the entry for `outcome` (created on
    /// demand, emptied entries removed), then the buffer is cleared. The
    /// multiset of stored timestamps is preserved.
    pub fn equal_credit(&mut self, outcome: f64) {
        let outcome_bits = outcome.to_bits();
        let pending = std::mem::take(&mut self.pending);
        for step in pending {
            if step.immediate_outcome.to_bits() == outcome_bits {
                continue; // re-keying to the same outcome is the identity
            }
            let inst = self
                .options
                .get_mut(&step.option)
                .expect("pending step for unknown option");
            let from = inst
                .find(step.immediate_outcome.to_bits())
                .expect("pending step outcome entry missing");
            let pos = inst.entries[from]
                .1
                .binary_search(&step.timestamp)
                .unwrap_or_else(|_| panic!("timestamp {} missing from entry", step.timestamp));
            inst.entries[from].1.remove(pos);
            if inst.entries[from].1.is_empty() {
                inst.entries.remove(from);
            }
            let to = match inst.find(outcome_bits) {
                Some(i) => i,
                None => {
                    inst.entries.push((outcome_bits, Vec::new()));
                    inst.entries.len() - 1
                }
            };
            let ts = &mut inst.entries[to].1;
            match ts.binary_search(&step.timestamp) {
                Ok(_) => panic!("timestamp {} already present after re-key", step.timestamp),
                Err(pos) => ts.insert(pos, step.timestamp),
            }
        }
    }

    /// Discards the pending buffer; steps before an episode boundary are no
    /// longer eligible for credit assignment.
    pub fn begin_episode(&mut self) {
        self.pending.clear();
    }

    pub fn snapshot(&self) -> MemorySnapshot {
        self.options
            .iter()
            .map(|(k, inst)| {
                (
                    k.clone(),
                    inst.iter().map(|(x, ts)| (x, ts.to_vec())).collect(),
                )
            })
            .collect()
    }
}
