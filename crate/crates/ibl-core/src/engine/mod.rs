//! The two interchangeable memory engines.
//!
//! Both engines implement the same decision contract: given the options for
//! the current step, compute every option's blended value from its eligible
//! instances and pick the argmax (ties uniform at random). They differ only
//! in storage layout and evaluation strategy:
//!
//! * [`BaselineEngine`] keeps one flat event record per occurrence and
//!   rescans it linearly at every query, evaluating each instance with
//!   scalar loops.
//! * [`SpeedyEngine`] keeps the nested option -> outcome -> timestamp-array
//!   dictionary and evaluates each instance with bulk array operations.
//!
//! Driven by identical stream keys, the two engines produce identical action
//! sequences; blended values agree to within floating-point associativity.

mod baseline;
mod speedy;

pub use baseline::{BaselineEngine, EventRecord};
pub use speedy::{speedy_base_level, speedy_blend, speedy_probabilities, SpeedyEngine};

use crate::key::{ActionId, OptionKey, StateKey};
use crate::memory::MemorySnapshot;
use crate::params::AgentParams;
use crate::streams::AgentStreams;

/// Result of one decision: the selected action and the blended value of
/// every option evaluated, in option order.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub action: ActionId,
    pub blended: Vec<(ActionId, f64)>,
}

pub trait Engine {
    /// Evaluates the given options at timestep `t` and selects an action.
    /// Options never seen before are first seeded with the default utility.
    fn choose(
        &mut self,
        options: &[OptionKey],
        t: u64,
        params: &AgentParams,
        streams: &AgentStreams,
    ) -> Choice;

    /// Stores timestep `t` under (option, outcome) and buffers the step.
    /// When `delayed_trigger` is set, equal credit assignment re-keys every
    /// buffered step to this outcome and clears the buffer.
    fn respond(&mut self, option: &OptionKey, outcome: f64, t: u64, delayed_trigger: bool);

    /// Marks an episode boundary: buffered steps from the previous episode
    /// are no longer eligible for credit assignment.
    fn begin_episode(&mut self);

    /// Ordered dictionary view of the whole memory.
    fn snapshot(&self) -> MemorySnapshot;

    /// Total stored occurrence timestamps (observed steps plus seeded
    /// options).
    fn stored_timestamps(&self) -> usize;

    fn name(&self) -> &'static str;
}

/// Decides whether a stored option's instances are eligible when evaluating
/// `query`. Without partial matching, only the identical option matches.
/// With partial matching, any stored option with the same action matches if
/// its state agrees exactly on every attribute not covered by a similarity
/// group; grouped attributes are left to the similarity term.
pub(crate) fn pool_match(
    query: &OptionKey,
    stored: &OptionKey,
    params: &AgentParams,
    grouped_sorted: &[usize],
) -> bool {
    if stored.action != query.action {
        return false;
    }
    if !params.partial_matching() {
        return stored.state == query.state;
    }
    states_compatible(&query.state, &stored.state, grouped_sorted)
}

fn states_compatible(query: &StateKey, stored: &StateKey, grouped_sorted: &[usize]) -> bool {
    match (query, stored) {
        (StateKey::Attrs(q), StateKey::Attrs(s)) => {
            q.len() == s.len()
                && q.iter().zip(s).enumerate().all(|(idx, (a, b))| {
                    grouped_sorted.binary_search(&idx).is_ok() || a == b
                })
        }
        // Digest keys carry no attribute structure: exact equality only.
        _ => query == stored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key::AttrValue;
    use crate::params::{SimilarityFn, SimilarityGroup};

    fn attrs(vals: &[f64]) -> StateKey {
        StateKey::nums(vals)
    }

    #[test]
    fn exact_mode_requires_identical_option() {
        let params = AgentParams::new(0.5, 0.25, 0.0);
        let a = OptionKey::new(attrs(&[1.0]), 2);
        let b = OptionKey::new(attrs(&[2.0]), 2);
        assert!(pool_match(&a, &a, &params, &[]));
        assert!(!pool_match(&a, &b, &params, &[]));
        assert!(!pool_match(&a, &OptionKey::new(attrs(&[1.0]), 3), &params, &[]));
    }

    #[test]
    fn partial_mode_frees_grouped_attributes_only() {
        let params = AgentParams::new(0.5, 0.25, 0.0).with_similarity_groups(vec![
            SimilarityGroup { attrs: vec![0], function: SimilarityFn::Linear { range: 10.0 } },
        ]);
        let grouped = params.grouped_indices();
        let query = OptionKey::new(attrs(&[1.0, 7.0]), 0);
        // Differs on the grouped attribute: eligible.
        assert!(pool_match(&query, &OptionKey::new(attrs(&[4.0, 7.0]), 0), &params, &grouped));
        // Differs on an ungrouped attribute: not eligible.
        assert!(!pool_match(&query, &OptionKey::new(attrs(&[1.0, 8.0]), 0), &params, &grouped));
        // Different action: never eligible.
        assert!(!pool_match(&query, &OptionKey::new(attrs(&[1.0, 7.0]), 1), &params, &grouped));
    }

    #[test]
    fn digest_states_always_exact() {
        let params = AgentParams::new(0.5, 0.25, 0.0).with_similarity_groups(vec![
            SimilarityGroup { attrs: vec![0], function: SimilarityFn::Exact },
        ]);
        let grouped = params.grouped_indices();
        let a = OptionKey::new(StateKey::digest_of(&[1]), 0);
        let b = OptionKey::new(StateKey::digest_of(&[2]), 0);
        assert!(pool_match(&a, &a, &params, &grouped));
        assert!(!pool_match(&a, &b, &params, &grouped));
    }

    #[test]
    fn mixed_key_shapes_never_match() {
        let params = AgentParams::new(0.5, 0.25, 0.0).with_similarity_groups(vec![
            SimilarityGroup { attrs: vec![0], function: SimilarityFn::Exact },
        ]);
        let grouped = params.grouped_indices();
        let a = OptionKey::new(StateKey::Attrs(vec![AttrValue::num(1.0)]), 0);
        let d = OptionKey::new(StateKey::digest_of(&[1]), 0);
        assert!(!pool_match(&a, &d, &params, &grouped));
    }
}
