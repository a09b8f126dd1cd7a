//! log zeta: the prime-power series for Re s > 1 and continuation of the
//! principal branch into the critical strip.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::euler_maclaurin::zeta_em;
use super::mangoldt::MangoldtTable;
use super::terms::{ln_table, power_term};
use crate::error::{Error, Result};
use crate::types::{ComplexSum, EvalProvenance, EvalResult, UNIT_ROUNDOFF};

/// Default distance of Re s from 1 required by [`log_zeta_series`].
pub const DEFAULT_SERIES_MARGIN: f64 = 0.5;
/// |zeta| below this on a continuation path is treated as a zero.
pub const OBSTRUCTION_THRESHOLD: f64 = 1e-8;
/// At or right of this abscissa the principal logarithm of zeta is the branch.
pub const PRINCIPAL_ABSCISSA: f64 = 1.5;

const MIN_STEP: f64 = 1e-9;
const MAX_HALVINGS: u32 = 40;

fn series_tail(sigma: f64, n: f64) -> f64 {
    let m = n + 1.0;
    m.powf(-sigma) + m.powf(1.0 - sigma) / (sigma - 1.0)
}

/// log zeta(s) from `sum_{n>=2} Lambda(n) / (n^s ln n)`.
pub fn log_zeta_series(s: Complex64, target_abs_err: f64) -> Result<EvalResult> {
    log_zeta_series_with_margin(s, target_abs_err, DEFAULT_SERIES_MARGIN)
}

pub fn log_zeta_series_with_margin(s: Complex64, target_abs_err: f64, margin: f64) -> Result<EvalResult> {
    if !(target_abs_err > 0.0) {
        return Err(Error::InvalidInput(format!(
            "target error must be positive, got {target_abs_err}"
        )));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidInput(format!("margin must be positive, got {margin}")));
    }
    let sigma = s.re;
    if !(sigma >= 1.0 + margin) || !s.im.is_finite() {
        return Err(Error::SlowConvergence(format!("Re s = {sigma} is below 1 + {margin}")));
    }
    let table = MangoldtTable::shared();
    let budget = 0.5 * target_abs_err;
    let mut hi = 2usize;
    while series_tail(sigma, hi as f64) > budget {
        hi *= 2;
        if hi > table.limit() {
            return Err(Error::SlowConvergence(format!(
                "tail at Re s = {sigma} needs more than {} terms",
                table.limit()
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if series_tail(sigma, mid as f64) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let cutoff = hi;
    let lns = ln_table(cutoff);
    let double_double = s.im.abs() > super::DOUBLE_DOUBLE_THRESHOLD;
    let mut sum = ComplexSum::default();
    let (mut err, mut abs) = (0.0, 0.0);
    for (n, pp) in table.prime_powers_up_to(cutoff) {
        let (term, e) = if double_double {
            power_term::<true>(lns[n], s.re, s.im)
        } else {
            power_term::<false>(lns[n], s.re, s.im)
        };
        let k = pp.exponent as f64;
        sum.add(term / k);
        err += e / k;
        abs += term.norm() / k;
    }
    let tail = series_tail(sigma, cutoff as f64);
    let total = err + 3.0 * UNIT_ROUNDOFF * abs + tail;
    if total > target_abs_err {
        return Err(Error::PrecisionExhausted {
            target: target_abs_err,
            achieved: total,
        });
    }
    Ok(
        EvalResult::new(sum.value(), total)?.with_provenance(EvalProvenance::PrimePowerSeries {
            cutoff: cutoff as u64,
            precision: if double_double { "double_double" } else { "double" }.to_string(),
        }),
    )
}

/// Bound on |log w - log w~| when |w - w~| <= err, on a fixed branch.
pub(crate) fn log_error(modulus: f64, err: f64) -> f64 {
    let d = err / modulus;
    if d >= 0.5 {
        f64::INFINITY
    } else {
        2.0 * d / (1.0 - d)
    }
}

/// Nearest angle to `reference` congruent to `arg`.
pub(crate) fn align_arg(arg: f64, reference: f64) -> f64 {
    arg + TAU * ((reference - arg) / TAU).round()
}

/// Continues `arg f` along the segment from `a` to `b` given `arg f(a)`.
///
/// Each accepted step changes the argument by less than pi/2 on both of its
/// halves. Returns `arg f(b)` on the continued branch, `f(b)` and the number
/// of accepted steps.
pub fn continue_arg<F>(
    f: &F,
    a: Complex64,
    fa: Complex64,
    arg_a: f64,
    b: Complex64,
    fb: Option<Complex64>,
) -> Result<(f64, Complex64, u32)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let check = |z: Complex64, w: Complex64| -> Result<Complex64> {
        let m = w.norm();
        if m < OBSTRUCTION_THRESHOLD {
            return Err(Error::BranchObstruction {
                re: z.re,
                im: z.im,
                modulus: m,
            });
        }
        Ok(w)
    };
    check(a, fa)?;
    let fb = match fb {
        Some(w) => check(b, w)?,
        None => check(b, f(b)?)?,
    };
    let mut stack = vec![(b, fb, 0u32)];
    let (mut z, mut w, mut arg) = (a, fa, arg_a);
    let mut steps = 0u32;
    while let Some(&(zb, wb, depth)) = stack.last() {
        let zm = 0.5 * (z + zb);
        let wm = check(zm, f(zm)?)?;
        let d1 = (wm / w).arg();
        let d2 = (wb / wm).arg();
        if d1.abs() < FRAC_PI_2 && d2.abs() < FRAC_PI_2 && (d1 + d2).abs() < PI {
            arg += d1 + d2;
            z = zb;
            w = wb;
            steps += 1;
            stack.pop();
        } else {
            if depth >= MAX_HALVINGS || (zb - z).norm() < MIN_STEP {
                return Err(Error::BranchObstruction {
                    re: zm.re,
                    im: zm.im,
                    modulus: wm.norm(),
                });
            }
            stack.push((zm, wm, depth + 1));
        }
    }
    Ok((align_arg(w.arg(), arg), w, steps))
}

/// The branch of log zeta(sigma + it) continuous along the horizontal
/// segment from the right half-plane, where it is the prime-power series.
pub fn log_zeta_tracked(sigma: f64, t: f64, target_abs_err: f64) -> Result<EvalResult> {
    if !(target_abs_err > 0.0) {
        return Err(Error::InvalidInput(format!(
            "target error must be positive, got {target_abs_err}"
        )));
    }
    if !(t >= 1.0) {
        return Err(Error::Precondition(format!("t = {t} must be at least 1")));
    }
    if !(sigma > 0.5) || !sigma.is_finite() {
        return Err(Error::Precondition(format!("sigma = {sigma} must exceed 1/2")));
    }
    let s = Complex64::new(sigma, t);
    let value = accurate_zeta(s, target_abs_err)?;
    let w = value.value;
    let ln_mod = w.norm().ln();
    let err = log_error(w.norm(), value.abs_error);
    if sigma >= PRINCIPAL_ABSCISSA {
        return Ok(EvalResult::new(Complex64::new(ln_mod, w.arg()), err)?
            .with_provenance(EvalProvenance::Tracked { steps: 0 }));
    }
    let anchor = Complex64::new(PRINCIPAL_ABSCISSA, t);
    let path_target = 1e-10;
    let eval = |z: Complex64| zeta_em(z, 0, path_target).map(|r| r.value);
    let wa = eval(anchor)?;
    let mut steps = 0u32;
    let (mut z, mut wz, mut arg) = (anchor, wa, wa.arg());
    let mut h = 0.25;
    while z.re > sigma {
        let next_re = (z.re - h).max(sigma);
        let zb = Complex64::new(next_re, t);
        let (a, wb, k) = continue_arg(&eval, z, wz, arg, zb, None)?;
        steps += k;
        z = zb;
        wz = wb;
        arg = a;
        h = (h * 2.0).min(0.5);
    }
    let arg = align_arg(w.arg(), arg);
    Ok(EvalResult::new(Complex64::new(ln_mod, arg), err)?.with_provenance(EvalProvenance::Tracked { steps }))
}

/// zeta(s) accurate enough that its logarithm meets `target`.
fn accurate_zeta(s: Complex64, target: f64) -> Result<EvalResult> {
    let mut tgt = (0.25 * target).min(1e-10);
    for _ in 0..4 {
        let r = zeta_em(s, 0, tgt)?;
        let m = r.value.norm();
        if m < OBSTRUCTION_THRESHOLD {
            return Err(Error::BranchObstruction {
                re: s.re,
                im: s.im,
                modulus: m,
            });
        }
        if log_error(m, r.abs_error) <= target {
            return Ok(r);
        }
        tgt = 0.25 * target * m;
    }
    Err(Error::PrecisionExhausted {
        target,
        achieved: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_at_fifty_is_two_to_minus_fifty() {
        let lead = 2f64.powi(-50);
        let r = log_zeta_series(Complex64::new(50.0, 0.0), 1e-14 * lead).unwrap();
        let oracle = lead + 3f64.powi(-50) + 0.5 * 4f64.powi(-50) + 5f64.powi(-50);
        assert!((r.value.re - oracle).abs() < 1e-14 * lead, "{r:?}");
        assert!((r.value.re - lead).abs() < 1e-8 * lead);
        assert_eq!(r.value.im, 0.0);
    }

    #[test]
    fn series_at_four_is_in_band() {
        let r = log_zeta_series(Complex64::new(4.0, 0.0), 1e-12).unwrap();
        let m = r.value.norm();
        assert!((0.0426..=0.0824).contains(&m), "{m}");
        let exact = (std::f64::consts::PI.powi(4) / 90.0).ln();
        assert!((r.value.re - exact).abs() <= 1e-12);
    }

    #[test]
    fn series_rejects_small_real_part() {
        assert!(matches!(
            log_zeta_series(Complex64::new(1.2, 3.0), 1e-10),
            Err(Error::SlowConvergence(_))
        ));
    }

    #[test]
    fn tracked_exponentiates_back() {
        let r = log_zeta_tracked(0.54, 30.0, 1e-9).unwrap();
        let z = zeta_em(Complex64::new(0.54, 30.0), 0, 1e-12).unwrap();
        assert!((r.value.exp() - z.value).norm() <= 1e-8, "{r:?}");
    }

    #[test]
    fn tracked_matches_series_right_of_one_and_a_half() {
        for &(sigma, t) in &[(4.0, 16.0), (2.0, 500.0), (1.5, 77.7)] {
            let a = log_zeta_tracked(sigma, t, 1e-10).unwrap();
            let b = log_zeta_series_with_margin(Complex64::new(sigma, t), 1e-3, 0.5);
            if let Ok(b) = b {
                assert!((a.value - b.value).norm() <= a.abs_error + b.abs_error);
            }
        }
    }

    #[test]
    fn continuation_around_unit_circle_of_z_gains_two_pi() {
        let f = |z: Complex64| Ok(z);
        let mut arg = 0.0;
        let mut w = Complex64::new(1.0, 0.0);
        for j in 1..=8 {
            let b = Complex64::from_polar(1.0, TAU * j as f64 / 8.0);
            let (a, wb, _) = continue_arg(
                &f,
                Complex64::from_polar(1.0, TAU * (j - 1) as f64 / 8.0),
                w,
                arg,
                b,
                None,
            )
            .unwrap();
            arg = a;
            w = wb;
        }
        assert!((arg - TAU).abs() < 1e-12);
    }
}
