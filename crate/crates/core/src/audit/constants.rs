//! The explicit constants of the growth chain, each stored with the formula
//! that produced it so the chain can be re-derived and checked.

use evalexpr::{eval_number_with_context, ContextWithMutableVariables, HashMapContext, Value};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The spacing between the nested radii `7/2 - k delta`.
pub const DEFAULT_DELTA: f64 = 0.01;
/// Default constant in `|zeta(sigma + it)| <= c1 |t|^{1/2}`.
pub const DEFAULT_C1: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    pub value: f64,
    pub formula: String,
}

/// `delta` and `c1` through `c8`. `c8 = exp(c7)` overflows a double, so
/// the ledger keeps `ln c8` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    pub delta: LedgerEntry,
    pub c1: LedgerEntry,
    pub c2: LedgerEntry,
    pub c3: LedgerEntry,
    pub c4: LedgerEntry,
    pub c5: LedgerEntry,
    pub c6: LedgerEntry,
    pub c7: LedgerEntry,
    pub ln_c8: LedgerEntry,
}

const FORMULAS: [(&str, &str); 7] = [
    ("c2", "(7.0 / delta) * 0.5"),
    ("c3", "(7.0 / delta) * (math::ln(c1) + 0.0824) + 0.0824"),
    ("c4", "math::ln((c2 + c3 / math::ln(16.0)) / 0.0426)"),
    (
        "c5",
        "2.0 * c4 + 4.0 * math::ln(1.0824) + 2.0 * math::ln(1.0 / ((3.5 - 2.0 * delta) * 0.012)) \
         + 24.0 * math::ln((3.5 - 2.0 * delta) / delta) + 2328.0",
    ),
    ("c6", "2.0 * ((3.5 - 3.0 * delta) + (3.5 - 4.0 * delta)) / delta"),
    ("c7", "((3.5 - 3.0 * delta) + (3.5 - 4.0 * delta)) / delta * c5"),
    ("ln_c8", "c7"),
];

fn evaluate(formula: &str, ctx: &HashMapContext) -> Result<f64> {
    eval_number_with_context(formula, ctx).map_err(|e| Error::Formula(format!("{formula}: {e}")))
}

fn bind(ctx: &mut HashMapContext, name: &str, value: f64) -> Result<()> {
    ctx.set_value(name.to_string(), Value::Float(value))
        .map_err(|e| Error::Formula(format!("{name}: {e}")))
}

fn literal(x: f64) -> String {
    format!("{x:?}")
}

impl ConstantsLedger {
    /// Propagates `c1` through the chain with `delta = 1/100`.
    pub fn derive(c1: f64) -> Result<Self> {
        Self::derive_with_delta(c1, DEFAULT_DELTA)
    }

    pub fn derive_with_delta(c1: f64, delta: f64) -> Result<Self> {
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::InvalidInput(format!("c1 must be positive, got {c1}")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidInput(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        let mut ctx = HashMapContext::new();
        let mut entries = vec![
            LedgerEntry {
                name: "delta".into(),
                value: delta,
                formula: literal(delta),
            },
            LedgerEntry {
                name: "c1".into(),
                value: c1,
                formula: literal(c1),
            },
        ];
        bind(&mut ctx, "delta", delta)?;
        bind(&mut ctx, "c1", c1)?;
        for (name, formula) in FORMULAS {
            let value = evaluate(formula, &ctx)?;
            bind(&mut ctx, name, value)?;
            entries.push(LedgerEntry {
                name: name.into(),
                value,
                formula: formula.into(),
            });
        }
        let mut it = entries.into_iter();
        let mut next = || it.next().expect("nine entries");
        Ok(Self {
            delta: next(),
            c1: next(),
            c2: next(),
            c3: next(),
            c4: next(),
            c5: next(),
            c6: next(),
            c7: next(),
            ln_c8: next(),
        })
    }

    pub fn entries(&self) -> [&LedgerEntry; 9] {
        [
            &self.delta,
            &self.c1,
            &self.c2,
            &self.c3,
            &self.c4,
            &self.c5,
            &self.c6,
            &self.c7,
            &self.ln_c8,
        ]
    }

    /// Re-evaluates every stored formula from the stored values of its
    /// predecessors and returns the largest relative discrepancy.
    pub fn recompute_discrepancy(&self) -> Result<f64> {
        let mut ctx = HashMapContext::new();
        let mut worst: f64 = 0.0;
        for entry in self.entries() {
            let value = evaluate(&entry.formula, &ctx)?;
            worst = worst.max((value - entry.value).abs() / entry.value.abs().max(1.0));
            bind(&mut ctx, &entry.name, entry.value)?;
        }
        Ok(worst)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries().into_iter().find(|e| e.name == name).map(|e| e.value)
    }

    /// `c2 ln t + c3`, the bound on `|log zeta|` right of `1/2 + 2 delta`.
    pub fn log_zeta_bound(&self, t: f64) -> f64 {
        self.c2.value * t.ln() + self.c3.value
    }

    /// `ln ln t + c4`, the bound on the counting function of 1-points.
    pub fn one_point_bound(&self, t: f64) -> f64 {
        t.ln().ln() + self.c4.value
    }

    /// `2 ln ln t + c5`, the bound on the characteristic.
    pub fn characteristic_bound(&self, t: f64) -> f64 {
        2.0 * t.ln().ln() + self.c5.value
    }

    /// `c6 ln ln t + c7`, the bound on `log+ |zeta|`; also `ln(c8 (ln t)^c6)`.
    pub fn log_modulus_bound(&self, t: f64) -> f64 {
        self.c6.value * t.ln().ln() + self.c7.value
    }

    /// `ln(c8 (ln t)^c6)`.
    pub fn log_growth_bound(&self, t: f64) -> f64 {
        self.ln_c8.value + self.c6.value * t.ln().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_for_default_c1() {
        let l = ConstantsLedger::derive(3.0).unwrap();
        assert_eq!(l.delta.value, 0.01);
        assert_eq!(l.c2.value, 350.0);
        let c3 = 700.0 * (3f64.ln() + 0.0824) + 0.0824;
        assert!((l.c3.value - c3).abs() < 1e-12 * c3);
        let c4 = ((350.0 + c3 / 16f64.ln()) / 0.0426).ln();
        assert!((l.c4.value - c4).abs() < 1e-12);
        let c5 = 2.0 * c4 + 4.0 * 1.0824f64.ln() + 2.0 * (1.0f64 / (3.48 * 0.012)).ln() + 24.0 * 348f64.ln() + 2328.0;
        assert!((l.c5.value - c5).abs() < 1e-9);
        assert!((l.c6.value - 1386.0).abs() < 1e-9);
        assert!((l.c7.value - 693.0 * c5).abs() < 1e-6);
        assert_eq!(l.ln_c8.value, l.c7.value);
    }

    #[test]
    fn ledger_reproduces_itself() {
        for c1 in [0.5, 3.0, 17.0] {
            let l = ConstantsLedger::derive(c1).unwrap();
            assert!(l.recompute_discrepancy().unwrap() < 1e-12);
        }
    }

    #[test]
    fn tampering_is_detected() {
        let mut l = ConstantsLedger::derive(3.0).unwrap();
        l.c4.value += 1e-6;
        assert!(l.recompute_discrepancy().unwrap() > 1e-8);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ConstantsLedger::derive(0.0).is_err());
        assert!(ConstantsLedger::derive_with_delta(3.0, 0.6).is_err());
    }
}
