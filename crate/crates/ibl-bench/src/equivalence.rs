//! Exact-replay equivalence checking between the two engines.
//!
//! Both engines are driven with identical stream keys over the same episode
//! schedule; the resulting decision traces must match action for action,
//! with blended values within 1e-9 relative tolerance. Any mismatch is
//! reported with its first location.

use anyhow::Result;

use ibl_core::env::StepTrace;

use crate::config::{EngineKind, ExperimentConfig, TaskAssets, TaskId};
use crate::runner::run_single;

pub const BLENDED_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DivergenceKind {
    /// Traces have different lengths (one engine took a different path).
    Length { baseline: usize, speedy: usize },
    Action { baseline: u32, speedy: u32 },
    Blended { action: u32, baseline: f64, speedy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub index: usize,
    pub t: u64,
    pub agent: u32,
    pub kind: DivergenceKind,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "step {} (t={}, agent {}): ", self.index, self.t, self.agent)?;
        match &self.kind {
            DivergenceKind::Length { baseline, speedy } => {
                write!(f, "trace lengths differ ({baseline} vs {speedy})")
            }
            DivergenceKind::Action { baseline, speedy } => {
                write!(f, "actions differ ({baseline} vs {speedy})")
            }
            DivergenceKind::Blended { action, baseline, speedy } => {
                write!(f, "blended value of action {action} differs ({baseline} vs {speedy})")
            }
        }
    }
}

/// First divergence between two decision traces, if any.
pub fn compare_traces(
    baseline: &[StepTrace],
    speedy: &[StepTrace],
    rel_tol: f64,
) -> Option<Divergence> {
    for (index, (b, s)) in baseline.iter().zip(speedy).enumerate() {
        debug_assert_eq!((b.t, b.agent), (s.t, s.agent));
        if b.action != s.action {
            return Some(Divergence {
                index,
                t: b.t,
                agent: b.agent,
                kind: DivergenceKind::Action { baseline: b.action, speedy: s.action },
            });
        }
        for (&(ab, vb), &(_, vs)) in b.blended.iter().zip(&s.blended) {
            let scale = vb.abs().max(vs.abs()).max(1.0);
            if (vb - vs).abs() > rel_tol * scale {
                return Some(Divergence {
                    index,
                    t: b.t,
                    agent: b.agent,
                    kind: DivergenceKind::Blended { action: ab, baseline: vb, speedy: vs },
                });
            }
        }
    }
    if baseline.len() != speedy.len() {
        let index = baseline.len().min(speedy.len());
        return Some(Divergence {
            index,
            t: 0,
            agent: 0,
            kind: DivergenceKind::Length { baseline: baseline.len(), speedy: speedy.len() },
        });
    }
    None
}

/// Full decision trace of a single run for one engine.
pub fn trace_run(config: &ExperimentConfig, kind: EngineKind) -> Result<Vec<StepTrace>> {
    config.validate()?;
    let assets = TaskAssets::load(config)?;
    let mut trace = Vec::new();
    let _rows = run_single(config, &assets, kind, 0, Some(&mut trace));
    Ok(trace)
}

/// Replays one configuration through both engines and reports the first
/// divergence, if any.
pub fn verify_config(config: &ExperimentConfig) -> Result<Option<Divergence>> {
    let baseline = trace_run(config, EngineKind::Baseline)?;
    let speedy = trace_run(config, EngineKind::Speedy)?;
    Ok(compare_traces(&baseline, &speedy, BLENDED_REL_TOL))
}

/// The standard verification battery: one small-scale configuration per
/// task.
pub fn standard_battery(seed: u64) -> Vec<(&'static str, ExperimentConfig)> {
    let mut battery = Vec::new();

    let mut binary = ExperimentConfig::new(TaskId::Binary);
    binary.runs = 1;
    binary.episodes = 1000;
    binary.seed = seed;
    battery.push(("binary choice, 1000 trials", binary));

    let mut insider = ExperimentConfig::new(TaskId::Insider);
    insider.runs = 1;
    insider.episodes = 100;
    insider.seed = seed;
    battery.push(("insider attack, 100 trials", insider));

    let mut minimap = ExperimentConfig::new(TaskId::Minimap);
    minimap.runs = 1;
    minimap.episodes = 5;
    minimap.step_limit = 200;
    minimap.seed = seed;
    minimap.map_text = Some(ibl_core::env::minimap::MINI_MAP.to_string());
    battery.push(("10x10 minimap, 5 episodes x 200 steps", minimap));

    let mut fireman = ExperimentConfig::new(TaskId::Fireman);
    fireman.runs = 1;
    fireman.episodes = 3;
    fireman.step_limit = 300;
    fireman.seed = seed;
    battery.push(("fireman, 3 episodes x 300 steps", fireman));

    let mut coopnav = ExperimentConfig::new(TaskId::Coopnav);
    coopnav.runs = 1;
    coopnav.episodes = 3;
    coopnav.step_limit = 300;
    coopnav.seed = seed;
    battery.push(("coopnav, 3 episodes x 300 steps", coopnav));

    battery
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(t: u64, action: u32, blended: Vec<(u32, f64)>) -> StepTrace {
        StepTrace { t, agent: 0, action, blended }
    }

    #[test]
    fn identical_traces_have_no_divergence() {
        let a = vec![case(1, 0, vec![(0, 1.0), (1, 0.5)])];
        assert_eq!(compare_traces(&a, &a.clone(), 1e-9), None);
    }

    #[test]
    fn action_divergence_is_located() {
        let a = vec![case(1, 0, vec![(0, 1.0)]), case(2, 0, vec![(0, 1.0)])];
        let mut b = a.clone();
        b[1].action = 1;
        let d = compare_traces(&a, &b, 1e-9).unwrap();
        assert_eq!(d.index, 1);
        assert_eq!(d.kind, DivergenceKind::Action { baseline: 0, speedy: 1 });
    }

    #[test]
    fn blended_divergence_beyond_tolerance_is_located() {
        let a = vec![case(1, 0, vec![(0, 1.0), (1, 2.0)])];
        let mut b = a.clone();
        b[0].blended[1].1 = 2.0 + 1e-6;
        let d = compare_traces(&a, &b, 1e-9).unwrap();
        assert!(matches!(d.kind, DivergenceKind::Blended { action: 1, .. }));
        // Inside tolerance: accepted.
        b[0].blended[1].1 = 2.0 + 1e-12;
        assert_eq!(compare_traces(&a, &b, 1e-9), None);
    }
}
