//! Bounds on zeta and log zeta on the line Re s = 4, and the closed-form
//! constants behind them.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use super::tail::{audit_tail_function, tail_verdicts, TailFunction};
use crate::error::Result;
use crate::types::UNIT_ROUNDOFF;
use crate::verdict::{Bound, LemmaVerdict};
use crate::zeta::{log_zeta_series, ZetaEvaluator};

pub const LOG_ZETA4_LOWER: f64 = 0.0426;
pub const LOG_ZETA4_UPPER: f64 = 0.0824;
pub const ZETA4_SEPARATION: f64 = 0.0426;
pub const ZETA4_LOWER: f64 = 0.917;
pub const ZETA4_UPPER: f64 = 1.0824;
pub const ZETA4_DERIVATIVE_LOWER: f64 = 0.012;

/// Evaluation target for the quantities at `4 + it`.
pub const ZETA4_TARGET: f64 = 1e-11;

/// Moduli at `4 + it` with their error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaFourValues {
    pub log_zeta: Complex64,
    pub log_zeta_err: f64,
    pub zeta: Complex64,
    pub zeta_err: f64,
    pub derivative: Complex64,
    pub derivative_err: f64,
}

pub fn zeta_four_values(t: f64, evaluator: &ZetaEvaluator) -> Result<ZetaFourValues> {
    let s = Complex64::new(4.0, t);
    let log = log_zeta_series(s, ZETA4_TARGET)?;
    let pair = evaluator.eval_pair(s, ZETA4_TARGET)?;
    let d = pair.derivative.expect("pair carries derivative");
    Ok(ZetaFourValues {
        log_zeta: log.value,
        log_zeta_err: log.abs_error,
        zeta: pair.value.value,
        zeta_err: pair.value.abs_error,
        derivative: d.value,
        derivative_err: d.abs_error,
    })
}

/// The four bounds at `4 + it`: `|log zeta|` in `[0.0426, 0.0824]`,
/// `|zeta - 1| >= 0.0426`, `|zeta|` in `[0.917, 1.0824]` and
/// `|zeta'| >= 0.012`.
pub fn audit_zeta_at_four(t: f64, evaluator: &ZetaEvaluator) -> Result<Vec<LemmaVerdict>> {
    let v = zeta_four_values(t, evaluator)?;
    let tag = |verdict: LemmaVerdict| verdict.input("t", t).input("sigma", 4.0);
    Ok(vec![
        tag(LemmaVerdict::new(
            "zeta4_log_modulus",
            v.log_zeta.norm(),
            Bound::interval(LOG_ZETA4_LOWER, LOG_ZETA4_UPPER),
            v.log_zeta_err,
        )),
        tag(LemmaVerdict::new(
            "zeta4_distance_from_one",
            (v.zeta - 1.0).norm(),
            Bound::lower(ZETA4_SEPARATION),
            v.zeta_err,
        )),
        tag(LemmaVerdict::new(
            "zeta4_modulus",
            v.zeta.norm(),
            Bound::interval(ZETA4_LOWER, ZETA4_UPPER),
            v.zeta_err,
        )),
        tag(LemmaVerdict::new(
            "zeta4_derivative_modulus",
            v.derivative.norm(),
            Bound::lower(ZETA4_DERIVATIVE_LOWER),
            v.derivative_err,
        )),
    ])
}

/// `int_3^inf ln x / x^4 dx` by Gauss-Legendre on dyadic panels after
/// `x = 3/u`, with the gap between two rules as the error estimate.
pub fn log_over_fourth_integral() -> (f64, f64) {
    let integrand = |u: f64| u * u * (3.0 / u).ln() / 27.0;
    let rule = |n: usize| {
        let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("positive degree"));
        let mut total = 0.0;
        let mut hi = 1.0f64;
        for _ in 0..60 {
            let lo = 0.5 * hi;
            total += gl.integrate(lo, hi, integrand);
            hi = lo;
        }
        total
    };
    let (coarse, fine) = (rule(12), rule(20));
    (fine, (fine - coarse).abs() + 16.0 * UNIT_ROUNDOFF * fine)
}

/// Checks of the closed-form constants used to prove the bounds at `4 + it`.
pub fn zeta_at_four_constants() -> Result<Vec<LemmaVerdict>> {
    let zeta4 = PI.powi(4) / 90.0;
    let u = 8.0 * UNIT_ROUNDOFF;
    let ln3 = 3f64.ln();
    let closed = ln3 / 81.0 + 1.0 / 243.0;
    let (integral, quad_err) = log_over_fourth_integral();
    let tail = audit_tail_function(TailFunction::LogOverFourth, 3.0, 100_000)?;
    let sum_upper = tail.alpha_estimate + closed;
    let derivative_constant = 2f64.ln() / 16.0 - 2.0 * ln3 / 81.0 - 1.0 / 243.0;
    let mut out = vec![
        LemmaVerdict::new(
            "zeta4_sum_upper_constant",
            zeta4 - 1.0,
            Bound::upper(LOG_ZETA4_UPPER),
            u,
        )
        .note("expression", "pi^4/90 - 1"),
        LemmaVerdict::new(
            "zeta4_separation_constant",
            1.125 - zeta4,
            Bound::lower(ZETA4_SEPARATION),
            u,
        )
        .note("expression", "9/8 - pi^4/90"),
        LemmaVerdict::new(
            "zeta4_modulus_lower_constant",
            2.0 - zeta4,
            Bound::lower(ZETA4_LOWER),
            u,
        )
        .note("expression", "2 - pi^4/90"),
        LemmaVerdict::new("zeta4_modulus_upper_constant", zeta4, Bound::upper(ZETA4_UPPER), u)
            .note("expression", "pi^4/90"),
        LemmaVerdict::new(
            "log_over_fourth_integral",
            (integral - closed).abs(),
            Bound::upper(0.0),
            quad_err,
        )
        .note("numerical", integral)
        .note("closed_form", closed)
        .note("expression", "int_3^inf ln x / x^4 dx = ln 3/81 + 1/243"),
        LemmaVerdict::new(
            "log_over_fourth_sum",
            sum_upper,
            Bound::upper(2.0 * ln3 / 81.0 + 1.0 / 243.0),
            tail.rounding_error + u,
        )
        .note("alpha_estimate", tail.alpha_estimate)
        .note("expression", "sum_{n>=3} ln n / n^4 <= 2 ln 3/81 + 1/243"),
        LemmaVerdict::new(
            "zeta4_derivative_constant",
            derivative_constant,
            Bound::lower(ZETA4_DERIVATIVE_LOWER),
            u,
        )
        .note("expression", "ln 2/16 - 2 ln 3/81 - 1/243"),
    ];
    out.extend(tail_verdicts(&TailFunction::LogOverFourth.label(), &tail));
    Ok(out)
}
