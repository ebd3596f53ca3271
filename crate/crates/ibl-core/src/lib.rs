//! Instance-based learning decision agents with two interchangeable memory
//! engines, the task environments they are exercised on, and the named
//! random streams that make full experiments replayable bit for bit.
//!
//! An agent's memory holds instances: (option, outcome, occurrence
//! timestamps) triplets, where an option is a (state, action) pair. Each
//! decision activates the instances of every candidate option by recency,
//! frequency, similarity, and logistic noise, turns activations into
//! retrieval probabilities with a temperature softmax, blends outcomes into
//! an expected value per option, and picks the argmax. Outcomes revealed
//! late are propagated backwards by equal credit assignment.
//!
//! The [`engine::BaselineEngine`] stores one flat record per occurrence and
//! rescans everything at every decision; the [`engine::SpeedyEngine`] keeps
//! per-instance contiguous timestamp arrays and evaluates them with bulk
//! array operations. Driven by the same [`streams`] keys they make identical
//! decisions, which is what the benchmark harness verifies and times.

pub mod engine;
pub mod env;
pub mod key;
pub mod math;
pub mod memory;
pub mod params;
pub mod streams;

pub use engine::{BaselineEngine, Choice, Engine, SpeedyEngine};
pub use key::{ActionId, AttrValue, OptionKey, StateKey};
pub use memory::{InstanceEntry, InstanceStore, MemorySnapshot, PendingStep};
pub use params::{AgentParams, ParamsError, SimilarityFn, SimilarityGroup};
pub use streams::{AgentStreams, EnvRng};
