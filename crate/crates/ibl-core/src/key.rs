//! Option identity: state keys and (state, action) pairs.
//!
//! States come in two shapes. Tasks with partial matching keep a small
//! attribute tuple so similarity can be computed per attribute. Gridworld
//! tasks identify a state by a 128-bit digest of the observation byte grid
//! (XXH3-128, seed 0), which is only valid when partial matching is off
//! because digesting destroys the attribute structure.

use std::hash::{Hash, Hasher};

use twox_hash::XxHash3_128;

pub type ActionId = u32;

/// A single state attribute. Numeric values compare bitwise on their
/// canonical encoding (`-0.0` is normalized to `0.0`, NaN is rejected).
#[derive(Debug, Clone, Copy)]
pub enum AttrValue {
    Num(f64),
    Sym(u32),
}

impl AttrValue {
    pub fn num(value: f64) -> Self {
        assert!(!value.is_nan(), "state attributes must not be NaN");
        AttrValue::Num(if value == 0.0 { 0.0 } else { value })
    }

    /// Numeric view used by similarity functions; symbols map to their code.
    pub fn as_f64(&self) -> f64 {
        match *self {
            AttrValue::Num(v) => v,
            AttrValue::Sym(s) => f64::from(s),
        }
    }

    fn canon(&self) -> (u8, u64) {
        match *self {
            AttrValue::Num(v) => (0, v.to_bits()),
            AttrValue::Sym(s) => (1, u64::from(s)),
        }
    }
}

impl PartialEq for AttrValue {
    fn eq(&self, other: &Self) -> bool {
        self.canon() == other.canon()
    }
}

impl Eq for AttrValue {}

impl Hash for AttrValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canon().hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StateKey {
    /// Ordered attribute tuple for partial-matching tasks.
    Attrs(Vec<AttrValue>),
    /// 128-bit digest of an observation byte grid.
    Digest(u128),
}

impl StateKey {
    pub fn attrs(values: Vec<AttrValue>) -> Self {
        StateKey::Attrs(values)
    }

    pub fn nums(values: &[f64]) -> Self {
        StateKey::Attrs(values.iter().map(|&v| AttrValue::num(v)).collect())
    }

    /// Digest key for a gridworld observation.
    pub fn digest_of(bytes: &[u8]) -> Self {
        StateKey::Digest(XxHash3_128::oneshot(bytes))
    }

    /// Attribute view; digest keys expose no attributes.
    pub fn attr_slice(&self) -> &[AttrValue] {
        match self {
            StateKey::Attrs(v) => v,
            StateKey::Digest(_) => &[],
        }
    }
}

/// A choice option: take `action` after observing `state`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OptionKey {
    pub state: StateKey,
    pub action: ActionId,
}

impl OptionKey {
    pub fn new(state: StateKey, action: ActionId) -> Self {
        Self { state, action }
    }
}
