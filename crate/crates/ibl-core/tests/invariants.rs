//! Property tests for the model invariants: probability normalization,
//! blended-value bounds, recency and frequency monotonicity, similarity
//! monotonicity, credit-assignment conservation, and tie-break shift
//! invariance.

use proptest::prelude::*;

use ibl_core::math;
use ibl_core::memory::InstanceStore;
use ibl_core::{
    AgentParams, AgentStreams, AttrValue, BaselineEngine, Engine, OptionKey, SimilarityFn,
    SimilarityGroup, SpeedyEngine, StateKey,
};

fn quiet(decay: f64) -> AgentParams {
    AgentParams::new(decay, 0.0, 0.0).with_temperature(1.0)
}

fn sorted_unique(mut stamps: Vec<u64>) -> Vec<u64> {
    stamps.sort_unstable();
    stamps.dedup();
    stamps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Retrieval probabilities normalize to 1 within 1e-12 and stay in
    /// [0, 1] even for activation lists up to 10^4 long.
    #[test]
    fn probabilities_normalize(
        activations in prop::collection::vec(-50.0f64..50.0, 1..10_000),
        temperature in 0.05f64..5.0,
    ) {
        let p = math::retrieval_probabilities(&activations, temperature);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let sum: f64 = p.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12, "sum {sum}");
    }

    /// A blended value stays inside the hull of the outcomes it blends.
    #[test]
    fn blended_value_bounded_by_outcomes(
        activations in prop::collection::vec(-10.0f64..10.0, 1..50),
        outcomes in prop::collection::vec(-100.0f64..100.0, 50),
        temperature in 0.05f64..5.0,
    ) {
        let outcomes = &outcomes[..activations.len()];
        let p = math::retrieval_probabilities(&activations, temperature);
        let v = math::blended_value(&p, outcomes);
        let lo = outcomes.iter().copied().fold(f64::MAX, f64::min);
        let hi = outcomes.iter().copied().fold(f64::MIN, f64::max);
        prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "{v} outside [{lo}, {hi}]");
    }

    /// With noise off and occurrences fixed, activation strictly decreases
    /// as time moves on (recency decay).
    #[test]
    fn activation_decreasing_in_time(
        stamps in prop::collection::vec(0u64..500, 1..30),
        decay in 0.1f64..1.5,
        gap in 1u64..100,
    ) {
        let stamps = sorted_unique(stamps);
        let t0 = stamps.last().unwrap() + 1;
        let params = quiet(decay);
        let early = math::activation(&stamps, t0, 0.0, 0.5, &params);
        let late = math::activation(&stamps, t0 + gap, 0.0, 0.5, &params);
        prop_assert!(late < early, "{late} !< {early}");
    }

    /// With noise off and time fixed, one more occurrence strictly raises
    /// activation (frequency effect).
    #[test]
    fn activation_increasing_in_occurrences(
        stamps in prop::collection::vec(0u64..500, 1..30),
        decay in 0.0f64..1.5,
        extra in 0u64..500,
    ) {
        let stamps = sorted_unique(stamps);
        prop_assume!(!stamps.contains(&extra));
        let t = stamps.last().unwrap().max(&extra) + 1;
        let params = quiet(decay);
        let base = math::activation(&stamps, t, 0.0, 0.5, &params);
        let mut more = stamps.clone();
        more.push(extra);
        more.sort_unstable();
        let richer = math::activation(&more, t, 0.0, 0.5, &params);
        prop_assert!(richer > base, "{richer} !> {base}");
    }

    /// With a nonnegative similarity weight and noise off, activation is
    /// non-decreasing in every per-attribute similarity value.
    #[test]
    fn activation_monotone_in_similarity(
        alpha in 0.0f64..3.0,
        query in 0.0f64..10.0,
        near in 0.0f64..10.0,
        far_offset in 0.0f64..5.0,
        decay in 0.0f64..1.0,
    ) {
        let far = if near <= query { near - far_offset } else { near + far_offset };
        let groups = vec![SimilarityGroup {
            attrs: vec![0],
            function: SimilarityFn::Linear { range: 20.0 },
        }];
        let mut params = quiet(decay).with_similarity_groups(groups);
        params.mismatch_penalty = alpha;
        let q = [AttrValue::num(query)];
        let sim_near = math::similarity_term(&q, &[AttrValue::num(near)], &params.similarity_groups);
        let sim_far = math::similarity_term(&q, &[AttrValue::num(far)], &params.similarity_groups);
        prop_assert!(sim_near >= sim_far);
        let a_near = math::activation(&[1], 3, sim_near, 0.5, &params);
        let a_far = math::activation(&[1], 3, sim_far, 0.5, &params);
        prop_assert!(a_near >= a_far);
    }

    /// Equal credit preserves the multiset of stored timestamps and leaves
    /// the buffer empty, for any respond history.
    #[test]
    fn equal_credit_conserves_timestamps(
        outcomes in prop::collection::vec(0u8..4, 1..60),
        options in prop::collection::vec(0u8..3, 60),
        new_outcome in 0u8..4,
    ) {
        let mut store = InstanceStore::new();
        let outcome_values = [-0.05, -0.01, 0.25, 0.75];
        for (i, (&o, &k)) in outcomes.iter().zip(&options).enumerate() {
            let option = OptionKey::new(StateKey::digest_of(&[k]), 0);
            store.record(option, outcome_values[o as usize], i as u64 + 1);
        }
        let stamps_before = all_stamps(&store);
        store.equal_credit(outcome_values[new_outcome as usize]);
        prop_assert!(store.pending().is_empty());
        prop_assert_eq!(stamps_before, all_stamps(&store));
    }

    /// Both engines conserve timestamps under delayed triggers driven
    /// through the public respond path.
    #[test]
    fn engines_conserve_timestamps_on_trigger(
        seed in 0u64..5_000,
        steps in 5usize..40,
    ) {
        let mut baseline = BaselineEngine::new();
        let mut speedy = SpeedyEngine::new();
        let mut rng = ibl_core::EnvRng::for_run(seed);
        for t in 1..=steps as u64 {
            let option = OptionKey::new(StateKey::digest_of(&[rng.next_below(3) as u8]), 0);
            let outcome = [-0.01, 0.5][rng.next_below(2) as usize];
            let delayed = rng.next_unit() < 0.3;
            baseline.respond(&option, outcome, t, delayed);
            speedy.respond(&option, outcome, t, delayed);
        }
        prop_assert_eq!(baseline.stored_timestamps(), steps);
        prop_assert_eq!(speedy.stored_timestamps(), steps);
        prop_assert_eq!(baseline.snapshot(), speedy.snapshot());
    }

    /// Adding the same constant to every blended value never changes the
    /// selected action.
    #[test]
    fn selection_invariant_under_shift(
        values in prop::collection::vec(-10.0f64..10.0, 1..8),
        shift in -100.0f64..100.0,
        seed in 0u64..1000,
    ) {
        let blended: Vec<(u32, f64)> = values.iter().copied().enumerate()
            .map(|(i, v)| (i as u32, v)).collect();
        let shifted: Vec<(u32, f64)> = blended.iter()
            .map(|&(a, v)| (a, v + shift)).collect();
        let streams = AgentStreams::new(seed, 0);
        let a = math::select_action(&blended, || streams.tie_break(9));
        let b = math::select_action(&shifted, || streams.tie_break(9));
        prop_assert_eq!(a, b);
    }

    /// Noise draws always land strictly inside (0, 1), keeping the logistic
    /// term finite.
    #[test]
    fn noise_draws_open_interval(seed in any::<u64>(), t in any::<u64>(), ordinal in 0u64..100) {
        let streams = AgentStreams::new(seed, 0);
        let xi = streams.noise(t, 0, ordinal);
        prop_assert!(xi > 0.0 && xi < 1.0);
        prop_assert!(math::logistic_noise(0.25, xi).is_finite());
    }
}

fn all_stamps(store: &InstanceStore) -> Vec<u64> {
    let mut stamps: Vec<u64> = store
        .snapshot()
        .into_iter()
        .flat_map(|(_, entries)| entries.into_iter().flat_map(|(_, ts)| ts))
        .collect();
    stamps.sort_unstable();
    stamps
}
