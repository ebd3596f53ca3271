//! Agent parameters: decay, noise, mismatch penalty, temperature, default
//! utility, and the partial-matching configuration.

use std::fmt;

/// Similarity function applied to one group of state attributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimilarityFn {
    /// 1.0 if the attribute values are equal, 0.0 otherwise.
    Exact,
    /// `1 - |u - v| / range`, the linear similarity on a bounded attribute.
    Linear { range: f64 },
}

impl SimilarityFn {
    pub fn eval(&self, query: f64, instance: f64) -> f64 {
        match *self {
            SimilarityFn::Exact => {
                if query.to_bits() == instance.to_bits() {
                    1.0
                } else {
                    0.0
                }
            }
            SimilarityFn::Linear { range } => 1.0 - (query - instance).abs() / range,
        }
    }
}

/// A set of attribute indices sharing one similarity function.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGroup {
    pub attrs: Vec<usize>,
    pub function: SimilarityFn,
}

/// IBL agent parameters.
///
/// `temperature` defaults to `noise * sqrt(2)`; tasks with partial matching
/// additionally configure `similarity_groups`, which must cover each
/// attribute index at most once. Attributes not covered by any group must
/// match exactly for an instance to be considered at all.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    /// Memory decay exponent `d` (>= 0).
    pub decay: f64,
    /// Activation noise amplitude `sigma` (>= 0).
    pub noise: f64,
    /// Weight `alpha` on the summed similarity term.
    pub mismatch_penalty: f64,
    /// Boltzmann temperature `tau` (> 0) of the retrieval softmax.
    pub temperature: f64,
    /// Outcome prepopulated for options never tried before.
    pub default_utility: f64,
    pub similarity_groups: Vec<SimilarityGroup>,
}

impl AgentParams {
    /// Parameters with the conventional temperature `noise * sqrt(2)`.
    pub fn new(decay: f64, noise: f64, default_utility: f64) -> Self {
        Self {
            decay,
            noise,
            mismatch_penalty: 1.0,
            temperature: noise * std::f64::consts::SQRT_2,
            default_utility,
            similarity_groups: Vec::new(),
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_similarity_groups(mut self, groups: Vec<SimilarityGroup>) -> Self {
        self.similarity_groups = groups;
        self
    }

    pub fn with_mismatch_penalty(mut self, alpha: f64) -> Self {
        self.mismatch_penalty = alpha;
        self
    }

    /// True when partial matching is configured.
    pub fn partial_matching(&self) -> bool {
        !self.similarity_groups.is_empty()
    }

    /// Attribute indices covered by some similarity group.
    pub fn grouped_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .similarity_groups
            .iter()
            .flat_map(|g| g.attrs.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.decay < 0.0 || !self.decay.is_finite() {
            return Err(ParamsError::NegativeDecay(self.decay));
        }
        if self.noise < 0.0 || !self.noise.is_finite() {
            return Err(ParamsError::NegativeNoise(self.noise));
        }
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(ParamsError::NonPositiveTemperature(self.temperature));
        }
        let indices = self.grouped_indices();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(ParamsError::OverlappingGroups(pair[0]));
            }
        }
        for group in &self.similarity_groups {
            if let SimilarityFn::Linear { range } = group.function {
                if !(range > 0.0) {
                    return Err(ParamsError::NonPositiveRange(range));
                }
            }
        }
        Ok(())
    }

    /// Checks that every grouped attribute index is in range for states of
    /// the given arity. Tasks call this once at setup time.
    pub fn check_arity(&self, arity: usize) -> Result<(), ParamsError> {
        for group in &self.similarity_groups {
            for &idx in &group.attrs {
                if idx >= arity {
                    return Err(ParamsError::AttributeOutOfRange { index: idx, arity });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamsError {
    NegativeDecay(f64),
    NegativeNoise(f64),
    NonPositiveTemperature(f64),
    NonPositiveRange(f64),
    OverlappingGroups(usize),
    AttributeOutOfRange { index: usize, arity: usize },
}

impl fmt::Display for ParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamsError::NegativeDecay(d) => write!(f, "decay must be >= 0, got {d}"),
            ParamsError::NegativeNoise(s) => write!(f, "noise must be >= 0, got {s}"),
            ParamsError::NonPositiveTemperature(t) => {
                write!(f, "temperature must be > 0, got {t}")
            }
            ParamsError::NonPositiveRange(r) => {
                write!(f, "linear similarity range must be > 0, got {r}")
            }
            ParamsError::OverlappingGroups(i) => {
                write!(f, "attribute index {i} appears in more than one similarity group")
            }
            ParamsError::AttributeOutOfRange { index, arity } => {
                write!(f, "similarity group index {index} out of range for arity {arity}")
            }
        }
    }
}

impl std::error::Error for ParamsError {}
