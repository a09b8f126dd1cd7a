//! Numerical checks of classical inequalities for a given function.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::functionals::{characteristic_t, counting_n, max_modulus, maximize_on_circle, CharacteristicReport};
use crate::error::{Error, Result};
use crate::functions::FunctionHandle;
use crate::types::{DiskSpec, PointList};
use crate::verdict::{Bound, LemmaVerdict};
use crate::zeros::locate_with_count;
use crate::zeta::log_plus;

/// The additive constant of the explicit second main theorem.
pub const SMT_ADDITIVE_CONSTANT: f64 = 2328.0;
const DEFAULT_TARGET: f64 = 1e-10;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

fn require_analytic(f: &FunctionHandle, disk: &DiskSpec) -> Result<()> {
    require(f.domain().strictly_contains_closed(disk), || {
        format!(
            "closed disk of radius {} about {} must lie inside the domain of {}",
            disk.radius,
            disk.center,
            f.label()
        )
    })?;
    if let Some(poles) = f.declared_poles() {
        if let Some(p) = poles
            .entries()
            .iter()
            .find(|p| (p.location - disk.center).norm() <= disk.radius)
        {
            return Err(Error::Precondition(format!(
                "{} has a pole at {} inside the disk",
                f.label(),
                p.location
            )));
        }
    }
    Ok(())
}

/// `T(r) <= log+ M(r) <= ((rho + r)/(rho - r)) T(rho)` for `f` analytic on
/// the closed `rho`-disk.
pub fn max_modulus_sandwich_check(f: &FunctionHandle, r: f64, rho: f64) -> Result<LemmaVerdict> {
    require(r > 0.0 && r < rho, || {
        format!("need 0 < r < rho, got r = {r}, rho = {rho}")
    })?;
    require_analytic(f, &DiskSpec::centered(rho)?)?;
    let t_r = characteristic_t(f, r, DEFAULT_TARGET)?;
    let t_rho = characteristic_t(f, rho, DEFAULT_TARGET)?;
    let mm = max_modulus(f, r)?;
    let log_m = log_plus(mm.value)?;
    let factor = (rho + r) / (rho - r);
    let upper = factor * t_rho.t;
    let m_err = if mm.value > 1.0 {
        (mm.eval_error + mm.refinement_tol * mm.value) / mm.value
    } else {
        0.0
    };
    let error = t_r.quad_error + factor * t_rho.quad_error + m_err;
    Ok(
        LemmaVerdict::new("max_modulus_sandwich", log_m, Bound::interval(t_r.t, upper), error)
            .input("r", r)
            .input("rho", rho)
            .note("function", f.label())
            .note("T_r", t_r.t)
            .note("T_rho", t_rho.t)
            .note("factor", factor)
            .note("max_modulus", mm.value)
            .note("lower_margin", log_m - t_r.t)
            .note("upper_margin", upper - log_m)
            .note("refinement_tol", mm.refinement_tol),
    )
}

/// `|f(z) - f(z0)| <= (2r/(R - r)) (A(R) - Re f(z0))` on the closed
/// `r`-disk about `z0`, with `A(R)` the maximum of `Re f` on the `R`-circle.
pub fn borel_caratheodory_check(
    f: &FunctionHandle,
    z0: Complex64,
    big_r: f64,
    r: f64,
    samples: usize,
) -> Result<LemmaVerdict> {
    require(r > 0.0 && r < big_r, || {
        format!("need 0 < r < R, got r = {r}, R = {big_r}")
    })?;
    require(samples >= 2, || "need at least two sample points".into())?;
    require_analytic(f, &DiskSpec::new(z0, big_r)?)?;
    let a_max = maximize_on_circle(z0, big_r, super::MAX_MODULUS_NODES, |z| {
        let w = f.sample(z)?;
        Ok((w.value.re, w.abs_error))
    })?;
    let f0 = f.sample(z0)?;
    let factor = 2.0 * r / (big_r - r);
    let rhs = factor * (a_max.value - f0.value.re);
    let boundary = samples / 2;
    let interior = samples - boundary;
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let mut worst = 0.0f64;
    let mut worst_at = z0;
    let mut eval_err = 0.0f64;
    let mut visit = |z: Complex64| -> Result<()> {
        let w = f.sample(z)?;
        let lhs = (w.value - f0.value).norm();
        eval_err = eval_err.max(w.abs_error);
        if lhs > worst {
            worst = lhs;
            worst_at = z;
        }
        Ok(())
    };
    for j in 0..boundary {
        visit(z0 + Complex64::from_polar(r, 2.0 * PI * j as f64 / boundary as f64))?;
    }
    for k in 0..interior {
        let rad = r * ((k as f64 + 0.5) / interior as f64).sqrt();
        visit(z0 + Complex64::from_polar(rad, golden_angle * k as f64))?;
    }
    let error = eval_err + f0.abs_error + factor * (a_max.eval_error + f0.abs_error);
    Ok(LemmaVerdict::new("borel_caratheodory", worst, Bound::upper(rhs), error)
        .input("R", big_r)
        .input("r", r)
        .input("z0_re", z0.re)
        .input("z0_im", z0.im)
        .input("samples", samples as f64)
        .note("function", f.label())
        .note("A_R", a_max.value)
        .note("re_f_z0", f0.value.re)
        .note("worst_point", json!([worst_at.re, worst_at.im])))
}

/// Settings of the second-main-theorem check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmtConfig {
    pub target_err: f64,
    pub locate_tol: f64,
}

impl Default for SmtConfig {
    fn default() -> Self {
        Self {
            target_err: DEFAULT_TARGET,
            locate_tol: 1e-10,
        }
    }
}

/// Every term of the second-main-theorem bound at one pair of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmtComponents {
    pub big_r: f64,
    pub r: f64,
    pub characteristic: CharacteristicReport,
    pub zeros: PointList,
    pub poles: PointList,
    pub ones: PointList,
    pub n_zeros: f64,
    pub n_poles: f64,
    pub n_ones: f64,
    pub log_plus_f0: f64,
    pub log_plus_inverse_derivative: f64,
    pub radius_term: f64,
    pub additive_constant: f64,
    pub rhs: f64,
    pub error_estimate: f64,
}

/// Evaluates both sides of
/// `T(r) < 2{N(R,1/f) + N(R,f) + N(R,1/(f-1))} + 4 log+|f(0)|
///        + 2 log+ 1/(R|f'(0)|) + 24 log(R/(R-r)) + 2328`.
pub fn second_main_theorem_components(
    f: &FunctionHandle,
    big_r: f64,
    r: f64,
    cfg: &SmtConfig,
) -> Result<SmtComponents> {
    require(r > 0.0 && r < big_r, || {
        format!("need 0 < r < R, got r = {r}, R = {big_r}")
    })?;
    let disk = DiskSpec::centered(big_r)?;
    require(f.domain().strictly_contains_closed(&disk), || {
        format!(
            "closed disk of radius {big_r} must lie inside the domain of {}",
            f.label()
        )
    })?;
    let origin = Complex64::new(0.0, 0.0);
    if let Some(poles) = f.declared_poles() {
        require(poles.entries().iter().all(|p| p.location.norm() > 0.0), || {
            "f(0) must not be a pole".into()
        })?;
    }
    let f0 = f.sample(origin)?;
    require(f0.value.norm() > f0.abs_error, || {
        format!("f(0) = {} must not vanish", f0.value)
    })?;
    require((f0.value - 1.0).norm() > f0.abs_error, || {
        format!("f(0) = {} must differ from 1", f0.value)
    })?;
    let df0 = f.sample_derivative(origin)?;
    require(df0.value.norm() > df0.abs_error, || {
        format!("f'(0) = {} must not vanish", df0.value)
    })?;

    let (zeros, used) = locate_with_count(f, origin, &disk, cfg.locate_tol)?;
    let (ones, used) = locate_with_count(f, Complex64::new(1.0, 0.0), &used, cfg.locate_tol)?;
    let big_r = used.radius;
    require(r < big_r, || {
        format!("adjusted radius {big_r} no longer exceeds r = {r}")
    })?;
    let zeros = zeros.within(&used);
    let poles = f.declared_poles().map(|p| p.within(&used)).unwrap_or_default();
    let characteristic = characteristic_t(f, r, cfg.target_err)?;
    let n_zeros = counting_n(&zeros, 0, big_r)?;
    let n_poles = counting_n(&poles, 0, big_r)?;
    let n_ones = counting_n(&ones, 0, big_r)?;
    let log_plus_f0 = log_plus(f0.value.norm())?;
    let inv = 1.0 / (big_r * df0.value.norm());
    let log_plus_inverse_derivative = log_plus(inv)?;
    let radius_term = 24.0 * (big_r / (big_r - r)).ln();
    let rhs = 2.0 * (n_zeros + n_poles + n_ones)
        + 4.0 * log_plus_f0
        + 2.0 * log_plus_inverse_derivative
        + radius_term
        + SMT_ADDITIVE_CONSTANT;
    let f0_err = if f0.value.norm() > 1.0 {
        4.0 * f0.abs_error / (f0.value.norm() - f0.abs_error)
    } else {
        0.0
    };
    let d_err = if inv > 1.0 {
        2.0 * df0.abs_error / (df0.value.norm() - df0.abs_error)
    } else {
        0.0
    };
    Ok(SmtComponents {
        big_r,
        r,
        error_estimate: characteristic.quad_error + f0_err + d_err,
        characteristic,
        zeros,
        poles,
        ones,
        n_zeros,
        n_poles,
        n_ones,
        log_plus_f0,
        log_plus_inverse_derivative,
        radius_term,
        additive_constant: SMT_ADDITIVE_CONSTANT,
        rhs,
    })
}

/// The explicit second main theorem for `f` with radii `r < R`.
pub fn second_main_theorem_check(f: &FunctionHandle, big_r: f64, r: f64) -> Result<LemmaVerdict> {
    second_main_theorem_check_with(f, big_r, r, &SmtConfig::default())
}

pub fn second_main_theorem_check_with(f: &FunctionHandle, big_r: f64, r: f64, cfg: &SmtConfig) -> Result<LemmaVerdict> {
    let c = second_main_theorem_components(f, big_r, r, cfg)?;
    Ok(smt_verdict(f.label(), &c))
}

pub(crate) fn smt_verdict(label: &str, c: &SmtComponents) -> LemmaVerdict {
    LemmaVerdict::new(
        "second_main_theorem",
        c.characteristic.t,
        Bound::upper(c.rhs),
        c.error_estimate,
    )
    .input("R", c.big_r)
    .input("r", c.r)
    .note("function", label)
    .note("N_zeros", c.n_zeros)
    .note("N_poles", c.n_poles)
    .note("N_ones", c.n_ones)
    .note("zero_count", c.zeros.total_multiplicity())
    .note("pole_count", c.poles.total_multiplicity())
    .note("one_count", c.ones.total_multiplicity())
    .note("log_plus_f0", c.log_plus_f0)
    .note("log_plus_inverse_derivative", c.log_plus_inverse_derivative)
    .note("radius_term", c.radius_term)
    .note("additive_constant", c.additive_constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sandwich_for_exponential() {
        let f = FunctionHandle::exp_scaled(c(1.0, 0.0), c(1.0, 0.0));
        let v = max_modulus_sandwich_check(&f, 1.0, 2.0).unwrap();
        assert!(v.pass, "{v:?}");
        assert!((v.computed - 1.0).abs() < 1e-12);
        match v.bound {
            Bound::Interval { lower, upper } => {
                assert!((lower - FRAC_1_PI).abs() < 1e-9);
                assert!((upper - 6.0 * FRAC_1_PI).abs() < 1e-8);
            }
            _ => panic!("interval expected"),
        }
    }

    #[test]
    fn sandwich_for_constant_and_cube() {
        assert!(
            max_modulus_sandwich_check(&FunctionHandle::constant(c(3.0, 0.0)), 1.0, 2.0)
                .unwrap()
                .pass
        );
        let v = max_modulus_sandwich_check(&FunctionHandle::power(3), 2.0, 3.0).unwrap();
        assert!(v.pass);
        assert!((v.computed - 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn borel_caratheodory_identity_and_constant() {
        let v = borel_caratheodory_check(&FunctionHandle::power(1), c(0.0, 0.0), 2.0, 1.0, 64).unwrap();
        assert!(v.pass && (v.computed - 1.0).abs() < 1e-12 && (v.bound_value() - 4.0).abs() < 1e-9);
        let v = borel_caratheodory_check(&FunctionHandle::constant(c(0.3, 1.0)), c(0.0, 0.0), 2.0, 1.0, 16).unwrap();
        assert!(v.pass && v.computed == 0.0 && v.bound_value() == 0.0);
    }

    #[test]
    fn smt_for_mobius_in_unit_disk() {
        let f = FunctionHandle::mobius(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).unwrap();
        let comps = second_main_theorem_components(&f, 1.0, 0.5, &SmtConfig::default()).unwrap();
        assert_eq!(comps.n_zeros + comps.n_poles + comps.n_ones, 0.0);
        assert!(comps.rhs >= 2328.0 + 24.0 * 2f64.ln());
        assert!(smt_verdict(f.label(), &comps).pass);
    }

    #[test]
    fn smt_rejects_f0_equal_one() {
        let f = FunctionHandle::exp_scaled(c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            second_main_theorem_check(&f, 2.0, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn smt_for_scaled_exponential_finds_three_one_points() {
        let f = FunctionHandle::exp_scaled(c(2.0, 0.0), c(1.0, 0.0));
        let comps = second_main_theorem_components(&f, 8.0, 4.0, &SmtConfig::default()).unwrap();
        assert_eq!(comps.ones.total_multiplicity(), 3);
        assert!(smt_verdict(f.label(), &comps).pass);
    }
}
