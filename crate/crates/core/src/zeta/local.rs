//! Many evaluations of zeta near one height.
//!
//! The Dirichlet partial sum is expanded in a Taylor series about the points
//! of a square grid; each expansion is built once and reused by every point
//! within reach of its centre. Boundary terms are evaluated exactly at the
//! requested point, so the only added errors are the truncated Taylor tail
//! and rounding, both bounded explicitly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::euler_maclaurin::{direct_tails, em_boundary, em_order_for, Method, ZetaEvaluator, ZetaPair};
use super::terms::{ln_table, power_term};
use super::{Precision, DOUBLE_DOUBLE_THRESHOLD};
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::types::{ComplexSum, EvalProvenance, EvalResult, UNIT_ROUNDOFF};

const U: f64 = UNIT_ROUNDOFF;
/// Spacing of expansion centres.
pub const GRID_SPACING: f64 = 0.2;
const REACH: f64 = 0.15;
/// Expansions are not worth building below this cutoff.
const MIN_CUTOFF: u64 = 1000;
const BLOCK: usize = 16;
const MAX_DEGREE: usize = 80;

/// `sum_{k>K} x^k / k!` bounded above.
fn exp_tail(x: f64, degree: usize) -> f64 {
    let k1 = (degree + 1) as f64;
    let mut lead = 1.0;
    for j in 1..=degree + 1 {
        lead *= x / j as f64;
    }
    let ratio = x / (k1 + 1.0);
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        lead / (1.0 - ratio)
    }
}

struct Expansion {
    center: Complex64,
    cutoff: u64,
    em: bool,
    dd: bool,
    moments: Vec<Complex64>,
    abs_sum: f64,
    term_err: f64,
    ln_max: f64,
    ln_cutoff: DoubleDouble,
}

impl Expansion {
    fn build(evaluator: &ZetaEvaluator, center: Complex64, budget: f64) -> Result<Option<Self>> {
        let worst = Complex64::new(center.re - REACH, center.im + REACH.copysign(center.im));
        let plan = evaluator.plan(worst, true, budget)?;
        if plan.cutoff < MIN_CUTOFF {
            return Ok(None);
        }
        let dd = match evaluator.precision {
            Precision::Double => false,
            Precision::DoubleDouble => true,
            Precision::Auto => center.im.abs() > DOUBLE_DOUBLE_THRESHOLD,
        };
        let count = plan.cutoff as usize - 1;
        let table = ln_table(count + 1);
        let ln_max = table[count].hi;
        let x = REACH * ln_max;
        let mut degree = 1;
        while exp_tail(x, degree) > 1e-18 && degree < MAX_DEGREE {
            degree += 1;
        }
        let mut totals = vec![ComplexSum::default(); degree + 1];
        let mut block = vec![Complex64::new(0.0, 0.0); degree + 1];
        let (mut abs_sum, mut term_err) = (0.0, 0.0);
        for n in 1..=count {
            let (term, e) = if n == 1 {
                (Complex64::new(1.0, 0.0), 0.0)
            } else if dd {
                power_term::<true>(table[n], center.re, center.im)
            } else {
                power_term::<false>(table[n], center.re, center.im)
            };
            abs_sum += term.norm();
            term_err += e;
            let step = -table[n].hi;
            let mut w = term;
            block[0] += w;
            for (k, slot) in block.iter_mut().enumerate().skip(1) {
                w *= step / k as f64;
                *slot += w;
            }
            if n % BLOCK == 0 || n == count {
                for (total, slot) in totals.iter_mut().zip(block.iter_mut()) {
                    total.add(*slot);
                    *slot = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(Some(Self {
            center,
            cutoff: plan.cutoff,
            em: matches!(plan.method, Method::EulerMaclaurin { .. }),
            dd,
            moments: totals.iter().map(|t| t.value()).collect(),
            abs_sum,
            term_err,
            ln_max,
            ln_cutoff: table[count + 1],
        }))
    }

    fn eval(&self, s: Complex64, target: f64) -> Option<ZetaPair> {
        let z = s - self.center;
        let r = z.norm();
        if r > REACH {
            return None;
        }
        let degree = self.moments.len() - 1;
        let x = r * self.ln_max;
        let grow = x.exp();
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..=degree).rev() {
            dp = dp * z + p;
            p = p * z + self.moments[k];
        }
        let rounding =
            self.abs_sum * grow * U * (BLOCK as f64 + 8.0 + 2.0 * x + 2.0 * (degree + 1) as f64) + self.term_err * grow;
        let mut value_err = self.abs_sum * exp_tail(x, degree) + rounding;
        let mut deriv_err = self.ln_max * (self.abs_sum * exp_tail(x, degree - 1) + rounding);
        let (mut value, mut deriv) = (p, dp);
        let mut order = 0;
        let budget = 0.5 * target;
        if self.em {
            let (k, r0, r1) = em_order_for(s, self.cutoff, true, budget)?;
            order = k;
            let b = em_boundary(s, self.ln_cutoff, self.cutoff, k, true, self.dd);
            value += b.value;
            deriv += b.derivative;
            value_err += b.value_err + r0;
            deriv_err += b.derivative_err + r1;
        } else {
            if s.re <= 1.0 {
                return None;
            }
            let (t0, t1) = direct_tails(s.re, self.cutoff as f64);
            value_err += t0;
            deriv_err += t1;
        }
        if !(value_err.max(deriv_err) <= target) {
            return None;
        }
        let provenance = EvalProvenance::LocalExpansion {
            cutoff: self.cutoff,
            order: order as u32,
            degree: degree as u32,
            precision: if self.dd { "double_double" } else { "double" }.to_string(),
        };
        Some(ZetaPair {
            value: EvalResult::new(value, value_err)
                .ok()?
                .with_provenance(provenance.clone()),
            derivative: Some(EvalResult::new(deriv, deriv_err).ok()?.with_provenance(provenance)),
        })
    }
}

type Key = (i64, i64);

/// zeta and zeta' at many points, sharing work between nearby points.
///
/// Results are a pure function of the point and the target: every call with
/// the same arguments returns the same bits regardless of call order.
pub struct ZetaExpansions {
    evaluator: ZetaEvaluator,
    build_target: f64,
    grid: Mutex<HashMap<Key, Option<Arc<Expansion>>>>,
    memo: Mutex<HashMap<(u64, u64, u64), ZetaPair>>,
}

impl std::fmt::Debug for ZetaExpansions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZetaExpansions")
            .field("evaluator", &self.evaluator)
            .field("build_target", &self.build_target)
            .finish_non_exhaustive()
    }
}

impl ZetaExpansions {
    /// `build_target` sets the truncation budget used to size each
    /// expansion; evaluations asking for less accuracy reuse it.
    pub fn new(evaluator: ZetaEvaluator, build_target: f64) -> Self {
        Self {
            evaluator,
            build_target,
            grid: Mutex::new(HashMap::new()),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn evaluator(&self) -> &ZetaEvaluator {
        &self.evaluator
    }

    fn expansion(&self, key: Key) -> Result<Option<Arc<Expansion>>> {
        if let Some(e) = self.grid.lock().expect("expansion grid").get(&key) {
            return Ok(e.clone());
        }
        let center = Complex64::new(key.0 as f64 * GRID_SPACING, key.1 as f64 * GRID_SPACING);
        let built = match Expansion::build(&self.evaluator, center, 0.5 * self.build_target) {
            Ok(e) => e.map(Arc::new),
            Err(Error::PrecisionExhausted { .. }) | Err(Error::OutOfDomain(_)) | Err(Error::Pole) => None,
            Err(e) => return Err(e),
        };
        let mut grid = self.grid.lock().expect("expansion grid");
        Ok(grid.entry(key).or_insert(built).clone())
    }

    /// zeta(s) and zeta'(s), each within `target`.
    pub fn eval_pair(&self, s: Complex64, target: f64) -> Result<ZetaPair> {
        let mkey = (s.re.to_bits(), s.im.to_bits(), target.to_bits());
        if let Some(p) = self.memo.lock().expect("zeta memo").get(&mkey) {
            return Ok(p.clone());
        }
        let key = (
            (s.re / GRID_SPACING).round() as i64,
            (s.im / GRID_SPACING).round() as i64,
        );
        let local = if target >= self.build_target && s.re > -1.0 && (s - 1.0).norm() > 2.0 * REACH {
            self.expansion(key)?.and_then(|e| e.eval(s, target))
        } else {
            None
        };
        let pair = match local {
            Some(p) => p,
            None => self.evaluator.eval_pair(s, target)?,
        };
        self.memo.lock().expect("zeta memo").insert(mkey, pair.clone());
        Ok(pair)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_agrees_with_direct_evaluation_at_great_height() {
        let cache = ZetaExpansions::new(ZetaEvaluator::default(), 1e-10);
        let direct = ZetaEvaluator::default();
        for &(re, im) in &[(0.52, 20_000.07), (0.6, 20_000.13), (2.7, 19_999.9), (7.4, 20_001.0)] {
            let s = Complex64::new(re, im);
            let a = cache.eval_pair(s, 1e-9).unwrap();
            let b = direct.eval_pair(s, 1e-11).unwrap();
            let (av, bv) = (a.value.value, b.value.value);
            assert!(
                (av - bv).norm() <= a.value.abs_error + b.value.abs_error,
                "{s}: {av} vs {bv}"
            );
            let (ad, bd) = (a.derivative.unwrap(), b.derivative.unwrap());
            assert!((ad.value - bd.value).norm() <= ad.abs_error + bd.abs_error);
        }
    }

    #[test]
    fn expansions_are_used_and_repeatable() {
        let cache = ZetaExpansions::new(ZetaEvaluator::default(), 1e-10);
        let s = Complex64::new(0.81, 30_000.33);
        let a = cache.eval_pair(s, 1e-9).unwrap();
        assert!(
            matches!(a.value.provenance, Some(EvalProvenance::LocalExpansion { .. })),
            "{a:?}"
        );
        let fresh = ZetaExpansions::new(ZetaEvaluator::default(), 1e-10);
        let _ = fresh.eval_pair(s + 0.05, 1e-9).unwrap();
        assert_eq!(fresh.eval_pair(s, 1e-9).unwrap(), a);
    }

    #[test]
    fn exp_tail_bounds_series() {
        let x: f64 = 1.7;
        let exact: f64 = x.exp()
            - (0..=10)
                .map(|k| x.powi(k) / (1..=k).product::<i32>().max(1) as f64)
                .sum::<f64>();
        assert!(exp_tail(x, 10) >= exact && exp_tail(x, 10) < 1.2 * exact);
    }
}
