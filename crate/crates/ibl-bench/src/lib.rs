//! Benchmark harness: experiment execution, engine comparison, equivalence
//! verification, the randomized math oracle, and CSV output.

pub mod config;
pub mod csv;
pub mod equivalence;
pub mod oracle;
pub mod runner;
pub mod stats;

pub use config::{EngineId, EngineKind, ExperimentConfig, TaskAssets, TaskId};
pub use runner::{compare_engines, run_experiment, Comparison, EpisodeRecord, ResultTable};
