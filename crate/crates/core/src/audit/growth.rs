//! Empirical constant in `|zeta(sigma + it)| <= c1 |t|^{1/2}` for
//! `sigma >= 1/2`, `|t| >= 2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verdict::{Bound, LemmaVerdict};
use crate::zeta::ZetaEvaluator;

const GROWTH_TARGET: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthAudit {
    pub verdict: LemmaVerdict,
    pub empirical_c1: f64,
    pub worst_sigma: f64,
    pub worst_t: f64,
}

/// `{0.5, 0.54, 1, 2, 4}` against `per_sigma` log-spaced heights in `[2, t_max]`.
pub fn default_growth_grid(per_sigma: usize, t_max: f64) -> (Vec<f64>, Vec<f64>) {
    let sigmas = vec![0.5, 0.54, 1.0, 2.0, 4.0];
    (sigmas, log_spaced(2.0, t_max, per_sigma))
}

/// `n` points from `lo` to `hi` equally spaced in `ln t`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k + 1 == n {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Maximum of `|zeta(sigma + it)| / |t|^{1/2}` over the grid, compared with `c1`.
pub fn audit_half_power_growth(sigmas: &[f64], ts: &[f64], c1: f64, evaluator: &ZetaEvaluator) -> Result<GrowthAudit> {
    if sigmas.is_empty() || ts.is_empty() {
        return Err(Error::InvalidInput("empty sample grid".into()));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.5)) {
        return Err(Error::Precondition(format!("sigma = {s} is below 1/2")));
    }
    if let Some(t) = ts.iter().find(|t| !(t.abs() >= 2.0)) {
        return Err(Error::Precondition(format!("|t| = {} is below 2", t.abs())));
    }
    let points: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect();
    let ratios = points
        .par_iter()
        .map(|&(sigma, t)| {
            let w = evaluator.eval(Complex64::new(sigma, t), 0, GROWTH_TARGET)?;
            let scale = t.abs().sqrt();
            Ok((w.value.norm() / scale, w.abs_error / scale))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (mut best, mut at, mut err) = (f64::NEG_INFINITY, 0, 0.0f64);
    for (k, &(r, e)) in ratios.iter().enumerate() {
        err = err.max(e);
        if r > best {
            best = r;
            at = k;
        }
    }
    let (worst_sigma, worst_t) = points[at];
    let verdict = LemmaVerdict::new("half_power_growth", best, Bound::upper(c1), err)
        .input("c1", c1)
        .input("samples", points.len() as f64)
        .note("worst_sigma", worst_sigma)
        .note("worst_t", worst_t);
    Ok(GrowthAudit {
        verdict,
        empirical_c1: best,
        worst_sigma,
        worst_t,
    })
}
