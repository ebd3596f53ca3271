//! The activation / retrieval-probability / blending math both engines must
//! agree on, in scalar reference form.
//!
//! Activation of an instance with occurrence timestamps `T` at time `t` is
//!
//! ```text
//! ln( sum_{t' in T} (t - t')^(-d) )  +  alpha * sim  +  sigma * ln((1-xi)/xi)
//! ```
//!
//! Retrieval probabilities are a temperature softmax over an option's
//! instance activations, and the blended value is the retrieval-probability
//! weighted sum of instance outcomes.

use crate::key::{ActionId, AttrValue};
use crate::params::{AgentParams, SimilarityGroup};

/// Summed similarity between two attribute tuples under the configured
/// groups. With no groups configured this is 0. Panics on arity mismatch:
/// states of differing arity are a task configuration bug.
pub fn similarity_term(
    query: &[AttrValue],
    instance: &[AttrValue],
    groups: &[SimilarityGroup],
) -> f64 {
    if groups.is_empty() {
        return 0.0;
    }
    assert_eq!(
        query.len(),
        instance.len(),
        "similarity_term: attribute arity mismatch"
    );
    let mut total = 0.0;
    for group in groups {
        for &idx in &group.attrs {
            total += group
                .function
                .eval(query[idx].as_f64(), instance[idx].as_f64());
        }
    }
    total
}

/// Base-level term: `ln(sum((t - t')^-d))` over the occurrence timestamps,
/// evaluated one element at a time.
pub fn base_level(timestamps: &[u64], t: u64, decay: f64) -> f64 {
    assert!(!timestamps.is_empty(), "instance with no occurrences");
    let mut sum = 0.0;
    for &stamp in timestamps {
        debug_assert!(stamp < t, "timestamp {stamp} not before t={t}");
        sum += ((t - stamp) as f64).powf(-decay);
    }
    sum.ln()
}

/// Logistic activation noise `sigma * ln((1 - xi) / xi)` for `xi` in (0, 1).
#[inline]
pub fn logistic_noise(sigma: f64, xi: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    debug_assert!(xi > 0.0 && xi < 1.0, "noise draw must lie in (0,1)");
    sigma * ((1.0 - xi) / xi).ln()
}

/// Full activation of one instance.
pub fn activation(timestamps: &[u64], t: u64, sim: f64, xi: f64, params: &AgentParams) -> f64 {
    base_level(timestamps, t, params.decay)
        + params.mismatch_penalty * sim
        + logistic_noise(params.noise, xi)
}

/// Softmax of `activations / temperature`, stabilized by subtracting the
/// maximum activation before exponentiation (an analytic no-op).
pub fn retrieval_probabilities(activations: &[f64], temperature: f64) -> Vec<f64> {
    assert!(!activations.is_empty(), "no instances to retrieve from");
    assert!(temperature > 0.0, "temperature must be positive");
    let max = activations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = activations
        .iter()
        .map(|&a| ((a - max) / temperature).exp())
        .collect();
    let denom: f64 = out.iter().sum();
    for p in &mut out {
        *p /= denom;
    }
    out
}

/// Retrieval-probability weighted sum of outcomes.
pub fn blended_value(probabilities: &[f64], outcomes: &[f64]) -> f64 {
    assert_eq!(
        probabilities.len(),
        outcomes.len(),
        "blended_value: length mismatch"
    );
    debug_assert!((probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    probabilities
        .iter()
        .zip(outcomes)
        .map(|(p, x)| p * x)
        .sum()
}

/// Picks an action attaining the maximum blended value. Exact ties break
/// uniformly at random via the lazily-consumed tie-break draw.
pub fn select_action<F: FnOnce() -> f64>(blended: &[(ActionId, f64)], tie_draw: F) -> ActionId {
    assert!(!blended.is_empty(), "no options to select from");
    let max = blended
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<ActionId> = blended
        .iter()
        .filter(|&&(_, v)| v == max)
        .map(|&(a, _)| a)
        .collect();
    if tied.len() == 1 {
        return tied[0];
    }
    let draw = tie_draw();
    let idx = ((draw * tied.len() as f64) as usize).min(tied.len() - 1);
    tied[idx]
}
