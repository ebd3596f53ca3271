//! Randomized scalar oracle for the vectorized math.
//!
//! Generates small random memories (options, outcomes, timestamp sets) with
//! random similarity configurations and noise draws, evaluates each instance
//! along the vectorized path, and compares against a from-scratch scalar
//! transliteration of the activation, softmax, and blending formulas written
//! here, independent of the library's own implementations. The unstabilized
//! softmax used here is a deliberately different algebraic route.

use ibl_core::engine::{speedy_base_level, speedy_blend, speedy_probabilities};
use ibl_core::math::logistic_noise;
use ibl_core::params::{SimilarityFn, SimilarityGroup};
use ibl_core::EnvRng;

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub cases: u64,
    pub max_deviation: f64,
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} randomized cases, max |vectorized - scalar| = {:.3e}",
            self.cases, self.max_deviation
        )
    }
}

struct CaseInstance {
    outcome: f64,
    timestamps: Vec<u64>,
    attrs: Vec<f64>,
    xi: f64,
}

/// Scalar evaluation written independently of the library math: explicit
/// loops, no max-shift in the softmax.
fn scalar_eval(
    instances: &[CaseInstance],
    query: &[f64],
    groups: &[SimilarityGroup],
    t: u64,
    decay: f64,
    alpha: f64,
    sigma: f64,
    tau: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let mut activations = Vec::with_capacity(instances.len());
    for inst in instances {
        let mut strength = 0.0;
        for &stamp in &inst.timestamps {
            let lag = (t - stamp) as f64;
            strength += lag.powf(-decay);
        }
        let mut sim = 0.0;
        for group in groups {
            for &idx in &group.attrs {
                sim += match group.function {
                    SimilarityFn::Exact => {
                        if query[idx] == inst.attrs[idx] {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    SimilarityFn::Linear { range } => {
                        1.0 - (query[idx] - inst.attrs[idx]).abs() / range
                    }
                };
            }
        }
        let noise = if sigma == 0.0 {
            0.0
        } else {
            sigma * ((1.0 - inst.xi) / inst.xi).ln()
        };
        activations.push(strength.ln() + alpha * sim + noise);
    }
    let mut denom = 0.0;
    for &a in &activations {
        denom += (a / tau).exp();
    }
    let probabilities: Vec<f64> = activations.iter().map(|&a| (a / tau).exp() / denom).collect();
    let mut blended = 0.0;
    for (p, inst) in probabilities.iter().zip(instances) {
        blended += p * inst.outcome;
    }
    (activations, probabilities, blended)
}

/// Runs `cases` randomized comparisons and reports the worst absolute
/// deviation across activations, probabilities, and blended values.
pub fn oracle_check(cases: u64, seed: u64) -> OracleReport {
    let mut rng = EnvRng::for_run(seed ^ 0x04ac1e);
    let mut max_deviation = 0.0f64;

    for _ in 0..cases {
        let arity = 3;
        let n_groups = rng.next_below(3) as usize;
        let mut indices: Vec<usize> = (0..arity).collect();
        for i in 0..n_groups {
            let j = i + rng.next_below((arity - i) as u64) as usize;
            indices.swap(i, j);
        }
        let groups: Vec<SimilarityGroup> = (0..n_groups)
            .map(|g| SimilarityGroup {
                attrs: vec![indices[g]],
                function: if rng.next_unit() < 0.5 {
                    SimilarityFn::Exact
                } else {
                    SimilarityFn::Linear { range: 1.0 + rng.next_below(9) as f64 }
                },
            })
            .collect();
        let decay = rng.next_unit() * 1.2;
        let alpha = rng.next_unit() * 2.0;
        let sigma = if rng.next_unit() < 0.3 { 0.0 } else { rng.next_unit() * 0.5 };
        let tau = 0.1 + rng.next_unit() * 0.9;
        let t = 100;
        let query: Vec<f64> = (0..arity).map(|_| rng.next_below(10) as f64).collect();

        let n_options = 1 + rng.next_below(10);
        for _ in 0..n_options {
            let n_instances = 1 + rng.next_below(4) as usize;
            let instances: Vec<CaseInstance> = (0..n_instances)
                .map(|_| {
                    let n_stamps = 1 + rng.next_below(20) as usize;
                    let mut timestamps: Vec<u64> = Vec::with_capacity(n_stamps);
                    let mut stamp = 0u64;
                    for _ in 0..n_stamps {
                        stamp += 1 + rng.next_below(4);
                        timestamps.push(stamp.min(t - 1));
                    }
                    timestamps.dedup();
                    CaseInstance {
                        outcome: rng.next_below(21) as f64 - 10.0,
                        timestamps,
                        attrs: (0..arity).map(|_| rng.next_below(10) as f64).collect(),
                        xi: rng.next_unit(),
                    }
                })
                .collect();

            // Vectorized path.
            let fast_activations: Vec<f64> = instances
                .iter()
                .map(|inst| {
                    let sim: f64 = groups
                        .iter()
                        .map(|g| {
                            g.attrs
                                .iter()
                                .map(|&i| g.function.eval(query[i], inst.attrs[i]))
                                .sum::<f64>()
                        })
                        .sum();
                    speedy_base_level(&inst.timestamps, t, decay)
                        + alpha * sim
                        + logistic_noise(sigma, inst.xi)
                })
                .collect();
            let fast_probabilities = speedy_probabilities(&fast_activations, tau);
            let outcomes: Vec<f64> = instances.iter().map(|i| i.outcome).collect();
            let fast_blended = speedy_blend(&outcomes, &fast_probabilities);

            // Independent scalar path.
            let (slow_activations, slow_probabilities, slow_blended) =
                scalar_eval(&instances, &query, &groups, t, decay, alpha, sigma, tau);

            for (a, b) in fast_activations.iter().zip(&slow_activations) {
                max_deviation = max_deviation.max((a - b).abs());
            }
            for (a, b) in fast_probabilities.iter().zip(&slow_probabilities) {
                max_deviation = max_deviation.max((a - b).abs());
            }
            max_deviation = max_deviation.max((fast_blended - slow_blended).abs());
        }
    }
    OracleReport { cases, max_deviation }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousand_cases_agree_to_1e12() {
        let report = oracle_check(1000, 17);
        assert!(report.max_deviation < 1e-12, "{report}");
    }

    #[test]
    fn fixed_noise_free_case() {
        let instances = [CaseInstance {
            outcome: 1.0,
            timestamps: vec![1, 2],
            attrs: vec![0.0, 0.0, 0.0],
            xi: 0.5,
        }];
        let (activations, _, _) =
            scalar_eval(&instances, &[0.0, 0.0, 0.0], &[], 3, 0.5, 0.0, 0.0, 1.0);
        assert!((activations[0] - 0.534_799_996_739_570_3).abs() < 1e-12);
        let fast = speedy_base_level(&[1, 2], 3, 0.5);
        assert!((activations[0] - fast).abs() < 1e-12);
    }

    #[test]
    fn empty_similarity_groups_agree() {
        let report = oracle_check(50, 4242);
        assert!(report.max_deviation < 1e-12);
    }
}
