//! The constant `alpha = lim (sum_{a<=n<=N} f(n) - int_a^N f)` of a
//! nonnegative decreasing function, and the deviation bound
//! `|sum - int - alpha| <= f(xi - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CompensatedSum, UNIT_ROUNDOFF};
use crate::verdict::{Bound, LemmaVerdict};

/// Decreasing functions with closed-form antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailFunction {
    /// `x^{-p}` with `p > 1`.
    InversePower { p: f64 },
    /// `ln x / x^4`, decreasing for `x >= e^{1/4}`.
    LogOverFourth,
}

impl TailFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::InversePower { p } => x.powf(-p),
            Self::LogOverFourth => x.ln() / x.powi(4),
        }
    }

    pub fn antiderivative(&self, x: f64) -> f64 {
        match *self {
            Self::InversePower { p } => x.powf(1.0 - p) / (1.0 - p),
            Self::LogOverFourth => -(x.ln() / 3.0 + 1.0 / 9.0) / x.powi(3),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::InversePower { p } => format!("x^-{p}"),
            Self::LogOverFourth => "ln x / x^4".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheckResult {
    pub a: f64,
    pub alpha_estimate: f64,
    /// `[0, f(a)]`.
    pub alpha_range: [f64; 2],
    /// The true constant lies in `[alpha_estimate - alpha_uncertainty, alpha_estimate]`.
    pub alpha_uncertainty: f64,
    /// Largest `|sum - int - alpha_estimate|` over the checked `xi`.
    pub max_deviation: f64,
    /// Largest `|sum - int - alpha_estimate| - f(xi - 1)`; nonpositive when
    /// the deviation bound holds.
    pub max_excess: f64,
    pub worst_xi: u64,
    pub xi_max: u64,
    pub rounding_error: f64,
}

/// Checks the deviation bound for every integer `xi` in `[a + 1, xi_max]`,
/// estimating `alpha` at `xi_max`.
///
/// The sample must be nonnegative and nonincreasing at the integers and
/// half-integers from `a` to `xi_max`.
pub fn audit_sum_integral_tail<F, G>(f: F, antiderivative: G, a: f64, xi_max: u64) -> Result<TailCheckResult>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("a must be at least 1, got {a}")));
    }
    let first = a.ceil() as u64;
    let first_xi = (a + 1.0).ceil() as u64;
    if xi_max < first_xi + 1 {
        return Err(Error::InvalidInput(format!(
            "xi_max = {xi_max} leaves nothing to check above a + 1"
        )));
    }
    let fa = f(a);
    let mut prev = fa;
    let mut probe = |x: f64| -> Result<f64> {
        let v = f(x);
        if !(v >= 0.0) || v > prev {
            return Err(Error::NonMonotone(x));
        }
        prev = v;
        Ok(v)
    };
    let mut values = Vec::with_capacity((xi_max - first + 1) as usize);
    for n in first..=xi_max {
        if n as f64 > a {
            probe((n as f64 - 0.5).max(0.5 * (a + n as f64)))?;
        }
        values.push(probe(n as f64)?);
    }
    let big_f_a = antiderivative(a);
    let mut sum = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let mut partial = Vec::with_capacity(values.len());
    for (k, v) in values.iter().enumerate() {
        sum.add(*v);
        abs_sum += v;
        let xi = first + k as u64;
        partial.push((xi, sum.value() - (antiderivative(xi as f64) - big_f_a)));
    }
    let alpha = partial.last().expect("nonempty").1;
    let scale = abs_sum + big_f_a.abs() + antiderivative(xi_max as f64).abs();
    let rounding_error = 8.0 * UNIT_ROUNDOFF * scale;
    let mut max_deviation: f64 = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_xi = first_xi;
    for &(xi, d) in partial.iter().filter(|(xi, _)| *xi >= first_xi) {
        let dev = (d - alpha).abs();
        let excess = dev - f(xi as f64 - 1.0);
        max_deviation = max_deviation.max(dev);
        if excess > max_excess {
            max_excess = excess;
            worst_xi = xi;
        }
    }
    Ok(TailCheckResult {
        a,
        alpha_estimate: alpha,
        alpha_range: [0.0, fa],
        alpha_uncertainty: f(xi_max as f64),
        max_deviation,
        max_excess,
        worst_xi,
        xi_max,
        rounding_error,
    })
}

pub fn audit_tail_function(func: TailFunction, a: f64, xi_max: u64) -> Result<TailCheckResult> {
    if let TailFunction::InversePower { p } = func {
        if !(p > 1.0) {
            return Err(Error::InvalidInput(format!("exponent must exceed 1, got {p}")));
        }
    }
    audit_sum_integral_tail(|x| func.eval(x), |x| func.antiderivative(x), a, xi_max)
}

/// The constant inside `[0, f(a)]`, and the deviation bound at every `xi`.
pub fn tail_verdicts(label: &str, r: &TailCheckResult) -> Vec<LemmaVerdict> {
    vec![
        LemmaVerdict::new(
            "tail_constant_range",
            r.alpha_estimate,
            Bound::interval(r.alpha_range[0], r.alpha_range[1]),
            r.rounding_error,
        )
        .input("a", r.a)
        .input("xi_max", r.xi_max as f64)
        .note("function", label)
        .note("alpha_uncertainty", r.alpha_uncertainty),
        LemmaVerdict::new("tail_deviation", r.max_excess, Bound::upper(0.0), r.rounding_error)
            .input("a", r.a)
            .input("xi_max", r.xi_max as f64)
            .note("function", label)
            .note("max_deviation", r.max_deviation)
            .note("worst_xi", r.worst_xi),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inverse_square_constant() {
        let r = audit_tail_function(TailFunction::InversePower { p: 2.0 }, 1.0, 100_000).unwrap();
        let exact = PI * PI / 6.0 - 1.0;
        assert!(r.alpha_estimate >= exact - 1e-12);
        assert!(r.alpha_estimate - r.alpha_uncertainty <= exact + 1e-12);
        assert!(r.max_excess <= 0.0);
        assert!(tail_verdicts("x^-2", &r).iter().all(|v| v.pass));
    }

    #[test]
    fn deviation_at_ten_is_below_one_over_eighty_one() {
        let r = audit_tail_function(TailFunction::InversePower { p: 2.0 }, 1.0, 1_000_000).unwrap();
        let s: f64 = (1..=10).map(|n| 1.0 / (n * n) as f64).sum();
        let dev = (s - 0.9 - r.alpha_estimate).abs();
        assert!(dev <= 1.0 / 81.0);
    }

    #[test]
    fn log_over_fourth_from_three() {
        let r = audit_tail_function(TailFunction::LogOverFourth, 3.0, 10_000).unwrap();
        assert!(r.alpha_estimate >= 0.0 && r.alpha_estimate <= 3f64.ln() / 81.0);
        assert!(r.max_excess <= 0.0);
    }

    #[test]
    fn increasing_sample_rejected() {
        let e = audit_sum_integral_tail(|x| x, |x| 0.5 * x * x, 1.0, 10).unwrap_err();
        assert!(matches!(e, Error::NonMonotone(_)));
        let e = audit_tail_function(TailFunction::LogOverFourth, 1.0, 10).unwrap_err();
        assert!(matches!(e, Error::NonMonotone(_)));
    }
}
