//! Welch's unequal-variance t-test on per-run metric means.

use std::fmt;

use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    TooFewSamples,
    ZeroVariance,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::TooFewSamples => write!(f, "each sample needs at least 2 values"),
            StatsError::ZeroVariance => write!(f, "both samples have zero variance"),
        }
    }
}

impl std::error::Error for StatsError {}

pub fn mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Unbiased sample variance.
pub fn variance(sample: &[f64]) -> f64 {
    let m = mean(sample);
    sample.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (sample.len() - 1) as f64
}

pub fn std_dev(sample: &[f64]) -> f64 {
    variance(sample).sqrt()
}

/// Welch statistic and two-sided p-value via the Student-t distribution
/// with Welch-Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewSamples);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a), variance(b));
    if va == 0.0 && vb == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let se_a = va / na;
    let se_b = vb / nb;
    let t = (mean(a) - mean(b)) / (se_a + se_b).sqrt();
    let df = (se_a + se_b).powi(2)
        / (se_a.powi(2) / (na - 1.0) + se_b.powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid degrees of freedom");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok((t, p))
}
