//! The outcome of checking one inequality numerically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// The claimed bound a computed quantity is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    /// computed <= value
    Upper { value: f64 },
    /// computed >= value
    Lower { value: f64 },
    /// lower <= computed <= upper
    Interval { lower: f64, upper: f64 },
}

impl Bound {
    pub fn upper(value: f64) -> Self {
        Self::Upper { value }
    }

    pub fn lower(value: f64) -> Self {
        Self::Lower { value }
    }

    pub fn interval(lower: f64, upper: f64) -> Self {
        Self::Interval { lower, upper }
    }

    /// Signed distance from `computed` to the violated side; negative when
    /// the bound fails.
    pub fn margin(&self, computed: f64) -> f64 {
        match *self {
            Self::Upper { value } => value - computed,
            Self::Lower { value } => computed - value,
            Self::Interval { lower, upper } => (computed - lower).min(upper - computed),
        }
    }

    /// The side of the bound closest to `computed`.
    pub fn binding(&self, computed: f64) -> f64 {
        match *self {
            Self::Upper { value } | Self::Lower { value } => value,
            Self::Interval { lower, upper } => {
                if computed - lower <= upper - computed {
                    lower
                } else {
                    upper
                }
            }
        }
    }
}

/// One check: the measured quantity, its bound, and whether the bound holds
/// once numerical error is allowed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaVerdict {
    pub lemma_id: String,
    pub inputs: BTreeMap<String, f64>,
    pub computed: f64,
    pub bound: Bound,
    pub margin: f64,
    pub error_estimate: f64,
    pub pass: bool,
    pub provenance: BTreeMap<String, Value>,
}

impl LemmaVerdict {
    pub fn new(lemma_id: impl Into<String>, computed: f64, bound: Bound, error_estimate: f64) -> Self {
        let margin = bound.margin(computed);
        Self {
            lemma_id: lemma_id.into(),
            inputs: BTreeMap::new(),
            computed,
            bound,
            margin,
            error_estimate,
            pass: margin >= -error_estimate,
            provenance: BTreeMap::new(),
        }
    }

    pub fn input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.to_string(), value);
        self
    }

    pub fn note(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.provenance.insert(key.to_string(), value.into());
        self
    }

    pub fn bound_value(&self) -> f64 {
        self.bound.binding(self.computed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_pass() {
        let v = LemmaVerdict::new("x", 1.0, Bound::upper(2.0), 0.0);
        assert_eq!(v.margin, 1.0);
        assert!(v.pass);
        let v = LemmaVerdict::new("x", 1.0, Bound::lower(1.0 + 1e-12), 1e-11);
        assert!(v.margin < 0.0 && v.pass);
        let v = LemmaVerdict::new("x", 0.05, Bound::interval(0.0426, 0.0824), 0.0);
        assert!((v.margin - (0.05 - 0.0426)).abs() < 1e-15);
        assert_eq!(v.bound_value(), 0.0426);
        let v = LemmaVerdict::new("x", 3.0, Bound::interval(0.0, 2.0), 0.5);
        assert!(!v.pass);
    }
}
