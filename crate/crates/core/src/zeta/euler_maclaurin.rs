//! Riemann zeta and its first derivative by Euler-Maclaurin summation.
//!
//! With cutoff `N` and `K` Bernoulli corrections,
//!
//! ```text
//! zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
//!         + sum_{k=1}^{K} B_2k/(2k)! (s)_{2k-1} N^{-s-2k+1} + R,
//! |R| <= |B_2K/(2K)!| |(s)_{2K}| N^{1-sigma-2K} / (sigma + 2K - 1).
//! ```
//!
//! The derivative differentiates every term in `s`; its remainder bound
//! follows from the same periodic Bernoulli bound. For large `sigma` a plain
//! Dirichlet truncation is cheaper and is used instead.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::terms::{dirichlet_partial_sums, ln_table, power_term, PartialSums};
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::types::{EvalProvenance, EvalResult, UNIT_ROUNDOFF};

const U: f64 = UNIT_ROUNDOFF;
const MAX_ORDER: usize = 250;
const MAX_CUTOFF: u64 = 1 << 31;
/// Heights above which `Auto` switches to double-double phases.
pub const DOUBLE_DOUBLE_THRESHOLD: f64 = 1.0e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    DoubleDouble,
    /// Double below [`DOUBLE_DOUBLE_THRESHOLD`], double-double above it or
    /// whenever double precision cannot meet the target.
    #[default]
    Auto,
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Self::Double),
            "double_double" | "double-double" | "dd" => Ok(Self::DoubleDouble),
            "auto" => Ok(Self::Auto),
            other => Err(Error::InvalidInput(format!("unknown precision mode {other:?}"))),
        }
    }
}

/// `B_2 / 2!` and the ratios `b_{k+1} / b_k` of `b_k = B_2k / (2k)!`.
struct BernoulliRatios {
    first: f64,
    ratios: Vec<f64>,
}

fn bernoulli_ratios() -> &'static BernoulliRatios {
    static CELL: OnceLock<BernoulliRatios> = OnceLock::new();
    CELL.get_or_init(|| {
        let exact = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30_240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 1_307_674_368_000.0,
            1.0 / 74_724_249_600.0,
        ];
        let zeta_even = |m: u32| -> f64 { (1..=60u32).rev().map(|n| (n as f64).powi(-(m as i32))).sum() };
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let mut ratios = Vec::with_capacity(MAX_ORDER);
        for k in 1..=MAX_ORDER {
            let r = if k < exact.len() {
                exact[k] / exact[k - 1]
            } else {
                let k = k as u32;
                -zeta_even(2 * k + 2) / (zeta_even(2 * k) * four_pi_sq)
            };
            ratios.push(r);
        }
        BernoulliRatios {
            first: exact[0],
            ratios,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) enum Method {
    Direct,
    EulerMaclaurin { order: usize },
}

#[derive(Debug, Clone, Copy)]
pub(super) struct Plan {
    pub method: Method,
    pub cutoff: u64,
    pub trunc0: f64,
    pub trunc1: f64,
}

/// Bounds on `sum_{n>=N} n^-sigma` and `sum_{n>=N} ln n n^-sigma`, sigma > 1.
pub(super) fn direct_tails(sigma: f64, n: f64) -> (f64, f64) {
    let a = sigma - 1.0;
    let ln_n = n.ln();
    let head = n.powf(-sigma);
    let t0 = head + n * head / a;
    let t1 = ln_n * head + n * head * (ln_n / a + 1.0 / (a * a));
    (t0, t1)
}

pub(super) fn plan_direct(s: Complex64, want_derivative: bool, budget: f64) -> Option<Plan> {
    let sigma = s.re;
    if sigma <= 1.0 {
        return None;
    }
    let ok = |n: u64| {
        let (t0, t1) = direct_tails(sigma, n as f64);
        t0 <= budget && (!want_derivative || t1 <= budget)
    };
    let mut hi = 4u64;
    while !ok(hi) {
        hi *= 2;
        if hi > MAX_CUTOFF {
            return None;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (trunc0, trunc1) = direct_tails(sigma, hi as f64);
    Some(Plan {
        method: Method::Direct,
        cutoff: hi,
        trunc0,
        trunc1: if want_derivative { trunc1 } else { 0.0 },
    })
}

/// Scaled correction coefficients `Q_k = b_k (s)_{2k-1} N^{1-2k}` and
/// their `s`-derivatives, for `k = 1..=order`.
pub(super) fn correction_coefficients(s: Complex64, n: f64, order: usize) -> Vec<(Complex64, Complex64)> {
    let b = bernoulli_ratios();
    let mut out = Vec::with_capacity(order);
    let mut q = s * (b.first / n);
    let mut dq = Complex64::new(b.first / n, 0.0);
    for k in 1..=order {
        out.push((q, dq));
        let a1 = s + (2 * k - 1) as f64;
        let a2 = s + (2 * k) as f64;
        let scale = b.ratios[k - 1] / (n * n);
        let next_q = q * a1 * a2 * scale;
        let next_dq = (dq * a1 * a2 + q * (a1 + a2)) * scale;
        q = next_q;
        dq = next_dq;
    }
    out
}

/// Remainder bounds after `k` corrections at cutoff `n`.
fn em_remainders(s: Complex64, n: f64, k: usize, q: Complex64, dq: Complex64) -> (f64, f64) {
    let sigma = s.re;
    let a1 = sigma + (2 * k) as f64 - 1.0;
    let shift = s + (2 * k - 1) as f64;
    let head = n.powf(-sigma);
    let qn = q.norm() * shift.norm();
    let r0 = qn * head / a1;
    let r1 = head * ((dq * shift + q).norm() / a1 + qn * (n.ln() / a1 + 1.0 / (a1 * a1)));
    (r0, r1)
}

pub(super) fn em_order_for(s: Complex64, n: u64, want_derivative: bool, budget: f64) -> Option<(usize, f64, f64)> {
    let nf = n as f64;
    let b = bernoulli_ratios();
    let mut q = s * (b.first / nf);
    let mut dq = Complex64::new(b.first / nf, 0.0);
    let mut best = f64::INFINITY;
    let mut worse_streak = 0;
    for k in 1..=MAX_ORDER {
        if s.re + (2 * k) as f64 - 1.0 > 0.0 {
            let (r0, r1) = em_remainders(s, nf, k, q, dq);
            let r = if want_derivative { r0.max(r1) } else { r0 };
            if r <= budget {
                return Some((k, r0, if want_derivative { r1 } else { 0.0 }));
            }
            if !r.is_finite() || r > 1e300 {
                return None;
            }
            if r < best {
                best = r;
                worse_streak = 0;
            } else {
                worse_streak += 1;
                if worse_streak > 8 {
                    return None;
                }
            }
        }
        if k < MAX_ORDER {
            let a1 = s + (2 * k - 1) as f64;
            let a2 = s + (2 * k) as f64;
            let scale = b.ratios[k - 1] / (nf * nf);
            let next_q = q * a1 * a2 * scale;
            dq = (dq * a1 * a2 + q * (a1 + a2)) * scale;
            q = next_q;
        }
    }
    None
}

pub(super) fn plan_em(s: Complex64, want_derivative: bool, budget: f64, min_cutoff: u64) -> Option<Plan> {
    let start = ((s.im.abs() / (2.0 * std::f64::consts::PI)) * 0.5).floor() as u64;
    let mut n = start.max(min_cutoff).max(2);
    while n <= MAX_CUTOFF {
        if let Some((order, trunc0, trunc1)) = em_order_for(s, n, want_derivative, budget) {
            return Some(Plan {
                method: Method::EulerMaclaurin { order },
                cutoff: n,
                trunc0,
                trunc1,
            });
        }
        n = (n as f64 * 1.25).ceil() as u64 + 1;
    }
    None
}

/// Evaluates zeta(s) and zeta'(s) with guaranteed absolute error bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEvaluator {
    pub precision: Precision,
    /// Multiplies the automatically chosen cutoff; values above 1 give a
    /// slower, independent reference evaluation.
    pub cutoff_scale: f64,
}

impl Default for ZetaEvaluator {
    fn default() -> Self {
        Self {
            precision: Precision::Auto,
            cutoff_scale: 1.0,
        }
    }
}

/// zeta(s) and optionally zeta'(s) from one summation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaPair {
    pub value: EvalResult,
    pub derivative: Option<EvalResult>,
}

impl ZetaEvaluator {
    pub fn new(precision: Precision) -> Self {
        Self {
            precision,
            ..Self::default()
        }
    }

    /// zeta(s) for `derivative_order = 0`, zeta'(s) for 1.
    pub fn eval(&self, s: Complex64, derivative_order: u8, target_abs_err: f64) -> Result<EvalResult> {
        match derivative_order {
            0 => Ok(self.run(s, false, target_abs_err)?.value),
            1 => Ok(self
                .run(s, true, target_abs_err)?
                .derivative
                .expect("derivative requested")),
            k => Err(Error::InvalidInput(format!("derivative order {k} not supported"))),
        }
    }

    /// Both zeta(s) and zeta'(s), each within `target_abs_err`.
    pub fn eval_pair(&self, s: Complex64, target_abs_err: f64) -> Result<ZetaPair> {
        self.run(s, true, target_abs_err)
    }

    fn run(&self, s: Complex64, want_derivative: bool, target: f64) -> Result<ZetaPair> {
        if !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite argument {s}")));
        }
        if !(target > 0.0) {
            return Err(Error::InvalidInput(format!(
                "target error must be positive, got {target}"
            )));
        }
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole);
        }
        if s.re <= -1.0 {
            return Err(Error::OutOfDomain(format!(
                "Re s = {} is left of the supported half-plane Re s > -1",
                s.re
            )));
        }
        match self.precision {
            Precision::Double => self.compute(s, want_derivative, target, false),
            Precision::DoubleDouble => self.compute(s, want_derivative, target, true),
            Precision::Auto => {
                if s.im.abs() > DOUBLE_DOUBLE_THRESHOLD {
                    self.compute(s, want_derivative, target, true)
                } else {
                    match self.compute(s, want_derivative, target, false) {
                        Err(Error::PrecisionExhausted { .. }) => self.compute(s, want_derivative, target, true),
                        other => other,
                    }
                }
            }
        }
    }

    pub(super) fn plan(&self, s: Complex64, want_derivative: bool, budget: f64) -> Result<Plan> {
        let direct = plan_direct(s, want_derivative, budget);
        let em = plan_em(s, want_derivative, budget, 2);
        let cost = |p: &Plan| match p.method {
            Method::Direct => p.cutoff as f64,
            Method::EulerMaclaurin { order } => p.cutoff as f64 + 4.0 * order as f64,
        };
        let chosen = match (direct, em) {
            (Some(d), Some(e)) => {
                if cost(&d) <= cost(&e) {
                    d
                } else {
                    e
                }
            }
            (Some(d), None) => d,
            (None, Some(e)) => e,
            (None, None) => {
                return Err(Error::PrecisionExhausted {
                    target: budget * 2.0,
                    achieved: f64::INFINITY,
                })
            }
        };
        if self.cutoff_scale == 1.0 {
            return Ok(chosen);
        }
        let scaled = ((chosen.cutoff as f64) * self.cutoff_scale).ceil().max(2.0) as u64;
        match chosen.method {
            Method::Direct => {
                let (t0, t1) = direct_tails(s.re, scaled as f64);
                Ok(Plan {
                    method: Method::Direct,
                    cutoff: scaled,
                    trunc0: t0,
                    trunc1: if want_derivative { t1 } else { 0.0 },
                })
            }
            Method::EulerMaclaurin { .. } => {
                plan_em(s, want_derivative, budget, scaled).ok_or(Error::PrecisionExhausted {
                    target: budget * 2.0,
                    achieved: f64::INFINITY,
                })
            }
        }
    }

    fn compute(&self, s: Complex64, want_derivative: bool, target: f64, dd: bool) -> Result<ZetaPair> {
        let plan = self.plan(s, want_derivative, 0.5 * target)?;
        let n = plan.cutoff as usize;
        let table = ln_table(n);
        let sums = dirichlet_partial_sums(&table, n - 1, s, want_derivative, dd);
        let precision = if dd { "double_double" } else { "double" }.to_string();

        let (mut value, mut value_err) = (sums.value, sums.value_err + plan.trunc0);
        let (mut deriv, mut deriv_err) = (sums.derivative, sums.derivative_err + plan.trunc1);

        let provenance = match plan.method {
            Method::Direct => EvalProvenance::Direct {
                cutoff: plan.cutoff,
                precision,
            },
            Method::EulerMaclaurin { order } => {
                let b = em_boundary(s, table[n], n as u64, order, want_derivative, dd);
                value += b.value;
                value_err += b.value_err;
                deriv += b.derivative;
                deriv_err += b.derivative_err;
                EvalProvenance::EulerMaclaurin {
                    cutoff: plan.cutoff,
                    order: order as u32,
                    precision,
                }
            }
        };

        let worst = if want_derivative {
            value_err.max(deriv_err)
        } else {
            value_err
        };
        if !(worst <= target) {
            return Err(Error::PrecisionExhausted {
                target,
                achieved: worst,
            });
        }
        let value = EvalResult::new(value, value_err)?.with_provenance(provenance.clone());
        let derivative = if want_derivative {
            Some(EvalResult::new(deriv, deriv_err)?.with_provenance(provenance))
        } else {
            None
        };
        Ok(ZetaPair { value, derivative })
    }
}

/// The non-sum part of the Euler-Maclaurin formula at cutoff `n`: the
/// integral, half-term and Bernoulli corrections, with rounding bounds.
pub(super) fn em_boundary(
    s: Complex64,
    ln_cutoff: DoubleDouble,
    n: u64,
    order: usize,
    want_derivative: bool,
    dd: bool,
) -> PartialSums {
    let nf = n as f64;
    let ln_n = ln_cutoff.hi;
    let (n_pow, n_pow_err) = if dd {
        power_term::<true>(ln_cutoff, s.re, s.im)
    } else {
        power_term::<false>(ln_cutoff, s.re, s.im)
    };
    let sm1 = s - 1.0;
    let integral = n_pow * nf / sm1;
    let half = n_pow * 0.5;
    let coeffs = correction_coefficients(s, nf, order);
    let mut corr = Complex64::new(0.0, 0.0);
    let (mut corr_abs, mut corr_round) = (0.0, 0.0);
    for (k, (q, _)) in coeffs.iter().enumerate() {
        corr += *q;
        corr_abs += q.norm();
        corr_round += q.norm() * (8 * k + 12) as f64;
    }
    let head_abs = nf / sm1.norm() + 0.5 + corr_abs;
    let value = integral + half + corr * n_pow;
    let value_err = n_pow_err * head_abs + U * n_pow.norm() * (8.0 * head_abs + corr_round);
    let (mut derivative, mut derivative_err) = (Complex64::new(0.0, 0.0), 0.0);
    if want_derivative {
        let inv = sm1.inv();
        let d_integral = -n_pow * nf * (inv * ln_n + inv * inv);
        let d_half = -n_pow * (0.5 * ln_n);
        let mut d_corr = Complex64::new(0.0, 0.0);
        let mut d_abs = 0.0;
        let mut d_round = 0.0;
        for (k, (q, dq)) in coeffs.iter().enumerate() {
            let c = *dq - *q * ln_n;
            d_corr += c;
            d_abs += c.norm();
            d_round += (dq.norm() + q.norm() * ln_n) * (16 * k + 24) as f64;
        }
        let d_head = nf * (ln_n * inv.norm() + inv.norm_sqr()) + 0.5 * ln_n + d_abs;
        derivative = d_integral + d_half + d_corr * n_pow;
        derivative_err = n_pow_err * d_head + U * n_pow.norm() * (16.0 * d_head + d_round);
    }
    PartialSums {
        value,
        value_err,
        derivative,
        derivative_err,
    }
}

/// zeta(s) (order 0) or zeta'(s) (order 1) with the default evaluator.
pub fn zeta_em(s: Complex64, derivative_order: u8, target_abs_err: f64) -> Result<EvalResult> {
    ZetaEvaluator::default().eval(s, derivative_order, target_abs_err)
}
