//! Cross-engine replay: identical histories driven through both engines
//! must produce identical decisions, near-identical blended values, and
//! identical memory dictionaries (including entry order, which the noise
//! contract depends on).

use ibl_core::env::{RunContext, StepTrace};
use ibl_core::{
    AgentParams, AgentStreams, BaselineEngine, Engine, EnvRng, OptionKey, SimilarityFn,
    SimilarityGroup, SpeedyEngine, StateKey,
};

fn assert_close(a: f64, b: f64, context: &str) {
    let scale = a.abs().max(b.abs()).max(1.0);
    assert!(
        (a - b).abs() <= 1e-9 * scale,
        "{context}: {a} vs {b}"
    );
}

/// Drives both engines through the same scripted interaction and checks
/// every decision and the final memory state.
fn replay_and_compare(
    params: &AgentParams,
    seed: u64,
    steps: u64,
    mut states_for: impl FnMut(&mut EnvRng) -> StateKey,
    actions: &[u32],
    outcomes: &[f64],
) {
    let streams = AgentStreams::new(seed, 0);
    let mut baseline = BaselineEngine::new();
    let mut speedy = SpeedyEngine::new();
    let mut script_rng = EnvRng::for_run(seed ^ 0xdead);
    let mut ctx = RunContext::new();

    for step in 0..steps {
        if step % 17 == 0 {
            baseline.begin_episode();
            speedy.begin_episode();
        }
        let state = states_for(&mut script_rng);
        let options: Vec<OptionKey> = actions
            .iter()
            .map(|&a| OptionKey::new(state.clone(), a))
            .collect();
        let t = ctx.t;
        let cb = baseline.choose(&options, t, params, &streams);
        let cs = speedy.choose(&options, t, params, &streams);
        assert_eq!(cb.action, cs.action, "step {step}: engines chose differently");
        assert_eq!(cb.blended.len(), cs.blended.len());
        for (&(ab, vb), &(as_, vs)) in cb.blended.iter().zip(&cs.blended) {
            assert_eq!(ab, as_);
            assert_close(vb, vs, &format!("step {step} action {ab}"));
        }
        let outcome = outcomes[script_rng.next_below(outcomes.len() as u64) as usize];
        let delayed = script_rng.next_unit() < 0.15;
        let chosen = options
            .iter()
            .find(|o| o.action == cb.action)
            .unwrap()
            .clone();
        baseline.respond(&chosen, outcome, t, delayed);
        speedy.respond(&chosen, outcome, t, delayed);
        ctx.t += 1;
    }

    let sb = baseline.snapshot();
    let ss = speedy.snapshot();
    assert_eq!(sb.len(), ss.len(), "option counts differ");
    for ((kb, eb), (ks, es)) in sb.iter().zip(&ss) {
        assert_eq!(kb, ks, "option order differs");
        assert_eq!(eb.len(), es.len(), "instance counts differ for {kb:?}");
        for ((xb, tb), (xs, ts)) in eb.iter().zip(es) {
            assert_eq!(xb.to_bits(), xs.to_bits(), "outcome order differs");
            assert_eq!(tb, ts, "timestamp sets differ");
        }
    }
    assert_eq!(baseline.stored_timestamps(), speedy.stored_timestamps());
}

#[test]
fn exact_matching_histories_agree() {
    let params = AgentParams::new(0.5, 0.25, 2.0);
    for seed in 0..20 {
        // Small digest-state pool so options recur and memories deepen.
        replay_and_compare(
            &params,
            seed,
            400,
            |rng| {
                let which = rng.next_below(6) as u8;
                StateKey::digest_of(&[which, which.wrapping_mul(3)])
            },
            &[0, 1, 2, 3],
            &[-0.05, -0.01, 0.25, 0.75],
        );
    }
}

#[test]
fn partial_matching_histories_agree() {
    let groups = vec![
        SimilarityGroup { attrs: vec![0], function: SimilarityFn::Linear { range: 8.0 } },
        SimilarityGroup { attrs: vec![1], function: SimilarityFn::Linear { range: 1.0 } },
    ];
    let params = AgentParams::new(0.5, 0.25, 10.0).with_similarity_groups(groups);
    for seed in 0..20 {
        replay_and_compare(
            &params,
            seed,
            300,
            |rng| {
                let reward = rng.next_below(5) as f64 + 1.0;
                let prob = rng.next_below(4) as f64 / 4.0;
                let tag = rng.next_below(2) as f64; // ungrouped: exact match
                StateKey::nums(&[reward, prob, tag])
            },
            &[0, 1, 2],
            &[-1.0, 0.0, 3.0, 5.0],
        );
    }
}

#[test]
fn zero_decay_and_high_noise_still_agree() {
    let mut params = AgentParams::new(0.0, 1.5, 1.0);
    params.mismatch_penalty = 2.0;
    for seed in 100..105 {
        replay_and_compare(
            &params,
            seed,
            200,
            |rng| StateKey::digest_of(&[rng.next_below(3) as u8]),
            &[0, 1],
            &[0.0, 1.0],
        );
    }
}

/// The spec's small-memory oracle: after any history of up to 20 records,
/// both engines give the same decision and blended values.
#[test]
fn short_histories_agree() {
    let params = AgentParams::new(0.5, 0.25, 4.4);
    for seed in 200..260 {
        replay_and_compare(
            &params,
            seed,
            20,
            |rng| StateKey::digest_of(&[rng.next_below(2) as u8]),
            &[0, 1],
            &[0.0, 3.0, 4.0],
        );
    }
}

/// Regrouping oracle: after ten thousand responds with periodic delayed
/// triggers, the flat record list regrouped equals the nested dictionary,
/// entry for entry, in order.
#[test]
fn regrouped_baseline_matches_speedy_dictionary() {
    let params = AgentParams::new(0.5, 0.25, 1.0);
    let streams = AgentStreams::new(31, 0);
    let mut baseline = BaselineEngine::new();
    let mut speedy = SpeedyEngine::new();
    let mut rng = EnvRng::for_run(31);
    let mut ctx = RunContext::new();
    for step in 0..10_000u64 {
        if step % 97 == 0 {
            baseline.begin_episode();
            speedy.begin_episode();
        }
        let state = StateKey::digest_of(&[rng.next_below(12) as u8]);
        let options: Vec<OptionKey> =
            (0..4).map(|a| OptionKey::new(state.clone(), a)).collect();
        let t = ctx.t;
        let cb = baseline.choose(&options, t, &params, &streams);
        let cs = speedy.choose(&options, t, &params, &streams);
        assert_eq!(cb.action, cs.action);
        let outcome = [-0.01, 0.25, 0.75][rng.next_below(3) as usize];
        let delayed = rng.next_unit() < 0.05;
        let chosen = &options[cb.action as usize];
        baseline.respond(chosen, outcome, t, delayed);
        speedy.respond(chosen, outcome, t, delayed);
        ctx.t += 1;
    }
    assert_eq!(baseline.snapshot(), speedy.snapshot());
    assert_eq!(baseline.stored_timestamps(), speedy.stored_timestamps());
}

/// Instance ordinals derived from either engine's snapshot agree after an
/// identical history, so the noise stream keys match across engines.
#[test]
fn ordinals_agree_across_engines() {
    use ibl_core::memory::ordinals_for;
    let params = AgentParams::new(0.5, 0.25, 9.0);
    let streams = AgentStreams::new(77, 0);
    let mut baseline = BaselineEngine::new();
    let mut speedy = SpeedyEngine::new();
    let mut ctx = RunContext::new();
    let state = StateKey::digest_of(&[1]);
    let options: Vec<OptionKey> = (0..2).map(|a| OptionKey::new(state.clone(), a)).collect();
    for (outcome, delayed) in [(3.0, false), (0.0, false), (3.0, true), (1.5, false)] {
        let t = ctx.t;
        let cb = baseline.choose(&options, t, &params, &streams);
        let cs = speedy.choose(&options, t, &params, &streams);
        assert_eq!(cb.action, cs.action);
        let chosen = &options[cb.action as usize];
        baseline.respond(chosen, outcome, t, delayed);
        speedy.respond(chosen, outcome, t, delayed);
        ctx.t += 1;
    }
    let sb = baseline.snapshot();
    let ss = speedy.snapshot();
    for option in &options {
        assert_eq!(ordinals_for(&sb, option), ordinals_for(&ss, option));
    }
    // A fresh option seeded with the default utility has a single instance
    // with ordinal zero.
    let fresh = OptionKey::new(StateKey::digest_of(&[9]), 0);
    let mut engine = SpeedyEngine::new();
    let _ = engine.choose(std::slice::from_ref(&fresh), 1, &params, &streams);
    let snap = engine.snapshot();
    assert_eq!(ordinals_for(&snap, &fresh), Some((0, vec![0])));
}

/// Multi-run driver smoke check: traces recorded by episode drivers carry
/// strictly increasing timesteps across episodes within a run.
#[test]
fn global_counter_never_resets() {
    use ibl_core::env::binary;
    let params = AgentParams::new(0.5, 0.25, 4.4);
    let streams = AgentStreams::new(5, 0);
    let mut engine = SpeedyEngine::new();
    let mut ctx = RunContext::new();
    let mut env_rng = EnvRng::for_run(5);
    let mut trace: Vec<StepTrace> = Vec::new();
    for _ in 0..50 {
        binary::run_episode(
            &mut engine,
            &mut ctx,
            &params,
            &streams,
            &mut env_rng,
            Some(&mut trace),
        );
    }
    let ts: Vec<u64> = trace.iter().map(|s| s.t).collect();
    let expected: Vec<u64> = (1..=50).collect();
    assert_eq!(ts, expected);
}
