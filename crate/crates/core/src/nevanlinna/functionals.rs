//! Proximity, counting and characteristic functions, circle maxima and the
//! Jensen identity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{adaptive_gauss, circle_node, golden_max, illinois, Integral};
use crate::error::{Error, Result};
use crate::functions::FunctionHandle;
use crate::types::{DiskSpec, EvalResult, PointList};

/// Divisor points closer than this to an integration circle are rejected.
pub const CIRCLE_CLEARANCE: f64 = 1e-9;
/// Largest node count tried by circle quadratures.
pub const MAX_CIRCLE_NODES: usize = 1 << 16;
const MIN_M_NODES: usize = 128;
const MIN_MEAN_NODES: usize = 256;
const CROSSING_TOL: f64 = 1e-13;
/// Node count of the sampling pass in circle maximisation.
pub const MAX_MODULUS_NODES: usize = 4096;
/// Angular tolerance of the golden-section refinement.
pub const REFINEMENT_TOL: f64 = 1e-10;

/// A circle average with its error budget split by source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleIntegral {
    pub value: f64,
    pub quad_error: f64,
    pub eval_error: f64,
    pub nodes: usize,
}

impl CircleIntegral {
    pub fn total_error(&self) -> f64 {
        self.quad_error + self.eval_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    pub r: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub quad_error: f64,
    pub n_at_zero: u32,
}

/// Largest value of a real function of the point on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMaximum {
    pub value: f64,
    pub phi: f64,
    pub point: Complex64,
    pub eval_error: f64,
    pub refinement_tol: f64,
    pub nodes: usize,
}

/// Both sides of the Jensen identity on one circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenReport {
    pub rho: f64,
    pub lhs: f64,
    pub circle_mean: f64,
    pub zero_sum: f64,
    pub pole_sum: f64,
    pub rhs: f64,
    pub residual: f64,
    pub quad_error: f64,
    pub eval_error: f64,
    pub nodes: usize,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "radius must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

fn check_circle_in_domain(f: &FunctionHandle, center: Complex64, r: f64) -> Result<()> {
    let disk = DiskSpec::new(center, r)?;
    if !f.domain().strictly_contains_closed(&disk) {
        return Err(Error::OutOfDomain(format!(
            "circle of radius {r} about {center} leaves the domain of {}",
            f.label()
        )));
    }
    Ok(())
}

fn check_clear_of_circle(points: &PointList, center: Complex64, r: f64, what: &str) -> Result<()> {
    for p in points.entries() {
        if ((p.location - center).norm() - r).abs() < CIRCLE_CLEARANCE {
            return Err(Error::InvalidInput(format!(
                "{what} at {} lies on the circle of radius {r}",
                p.location
            )));
        }
    }
    Ok(())
}

/// `ln |w|` and a bound on its error.
fn log_modulus(w: &EvalResult) -> (f64, f64) {
    let m = w.value.norm();
    let e = w.abs_error;
    if m == 0.0 {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let lo = (m - e).max(0.0);
    let err = if lo == 0.0 {
        f64::INFINITY
    } else {
        ((m + e) / m).ln().max((m / lo).ln())
    };
    (m.ln(), err)
}

/// Error of `log+ |w|` given the error of `w`.
fn log_plus_error(w: &EvalResult) -> f64 {
    let m = w.value.norm();
    let e = w.abs_error;
    if m + e <= 1.0 {
        return 0.0;
    }
    (m + e).ln() - (m - e).max(1.0).ln()
}

/// `(1/2pi) int_0^{2pi} log+ |f(r e^{i phi})| d phi`.
pub fn proximity_m(f: &FunctionHandle, r: f64, target_err: f64) -> Result<CircleIntegral> {
    check_radius(r)?;
    if !(target_err > 0.0) {
        return Err(Error::InvalidInput(format!(
            "target error must be positive, got {target_err}"
        )));
    }
    check_circle_in_domain(f, Complex64::new(0.0, 0.0), r)?;
    if let Some(poles) = f.declared_poles() {
        check_clear_of_circle(poles, Complex64::new(0.0, 0.0), r, "pole")?;
    }
    let mut prev: Option<f64> = None;
    let mut nodes = MIN_M_NODES;
    loop {
        let est = proximity_at(f, r, nodes, target_err)?;
        if let Some(p) = prev {
            let diff = (est.value - p).abs();
            if diff <= target_err + 2.0 * est.eval_error {
                return Ok(CircleIntegral {
                    value: est.value.max(0.0),
                    quad_error: diff + est.quad_error,
                    eval_error: est.eval_error,
                    nodes,
                });
            }
            if nodes >= MAX_CIRCLE_NODES {
                return Err(Error::NoConvergence {
                    estimate: est.value,
                    achieved: diff,
                    nodes,
                });
            }
        }
        prev = Some(est.value);
        nodes *= 2;
    }
}

fn proximity_at(f: &FunctionHandle, r: f64, nodes: usize, target: f64) -> Result<Integral> {
    let origin = Complex64::new(0.0, 0.0);
    let mut logs = Vec::with_capacity(nodes);
    let mut plus_err = 0.0;
    for j in 0..nodes {
        let (_, z) = circle_node(origin, r, j, nodes);
        let w = f.sample(z)?;
        plus_err += log_plus_error(&w);
        logs.push(log_modulus(&w).0);
    }
    let positive = logs.iter().filter(|&&l| l > 0.0).count();
    if positive == 0 || positive == nodes {
        let sum: f64 = logs.iter().map(|&l| l.max(0.0)).sum();
        return Ok(Integral {
            value: sum / nodes as f64,
            quad_error: 0.0,
            eval_error: plus_err / nodes as f64,
        });
    }
    let mut g = |phi: f64| -> Result<f64> {
        let w = f.sample(Complex64::from_polar(r, phi))?;
        Ok(log_modulus(&w).0)
    };
    let mut crossings = Vec::new();
    for j in 0..nodes {
        let k = (j + 1) % nodes;
        if (logs[j] > 0.0) != (logs[k] > 0.0) {
            let a = TAU * j as f64 / nodes as f64;
            let b = TAU * (j + 1) as f64 / nodes as f64;
            let root = illinois(&mut g, a, logs[j], b, logs[k], CROSSING_TOL)?;
            crossings.push((root, logs[k] > 0.0));
        }
    }
    let mut h = |phi: f64| -> Result<(f64, f64)> {
        let w = f.sample(Complex64::from_polar(r, phi))?;
        let (l, e) = log_modulus(&w);
        Ok((l.max(0.0), e))
    };
    let mut total = Integral::default();
    let count = crossings.len();
    let tol = 0.25 * target * TAU / count as f64;
    for i in 0..count {
        let (start, rising) = crossings[i];
        if !rising {
            continue;
        }
        let mut end = crossings[(i + 1) % count].0;
        if end <= start {
            end += TAU;
        }
        let part = adaptive_gauss(&mut h, start, end, tol)?;
        total.value += part.value;
        total.quad_error += part.quad_error;
        total.eval_error += part.eval_error;
    }
    Ok(Integral {
        value: total.value / TAU,
        quad_error: total.quad_error / TAU + 1e-13 * count as f64,
        eval_error: total.eval_error / TAU,
    })
}

/// `sum m log(r/|a|)` over nonzero divisor points plus `n_at_zero log r`.
///
/// Points at the origin are added to `n_at_zero`.
pub fn counting_n(divisor: &PointList, n_at_zero: u32, r: f64) -> Result<f64> {
    check_radius(r)?;
    let mut at_zero = n_at_zero as f64;
    let mut sum = 0.0;
    for p in divisor.entries() {
        let modulus = p.location.norm();
        if modulus > r {
            return Err(Error::InvalidInput(format!(
                "divisor point {} has modulus {modulus} > r = {r}",
                p.location
            )));
        }
        if modulus == 0.0 {
            at_zero += p.multiplicity as f64;
        } else {
            sum += p.multiplicity as f64 * (r / modulus).ln();
        }
    }
    Ok(sum + at_zero * r.ln())
}

/// `T(r, f) = m(r, f) + N(r, f)` using the declared poles of `f`; a handle
/// without declared poles is treated as analytic.
pub fn characteristic_t(f: &FunctionHandle, r: f64, target_err: f64) -> Result<CharacteristicReport> {
    let m = proximity_m(f, r, target_err)?;
    let mut inside = PointList::new();
    let mut n_at_zero = 0;
    if let Some(poles) = f.declared_poles() {
        for p in poles.entries() {
            let modulus = p.location.norm();
            if modulus == 0.0 {
                n_at_zero += p.multiplicity;
            } else if modulus <= r {
                inside.push(p.location, p.multiplicity)?;
            }
        }
    }
    let n = counting_n(&inside, n_at_zero, r)?;
    Ok(CharacteristicReport {
        r,
        m: m.value,
        n,
        t: m.value + n,
        quad_error: m.total_error(),
        n_at_zero,
    })
}

/// Maximum over the circle `|z - center| = r` of a real function `g`
/// returning a value and its error: dense sampling, then golden-section
/// refinement of the three largest local maxima.
pub fn maximize_on_circle<G>(center: Complex64, r: f64, nodes: usize, g: G) -> Result<CircleMaximum>
where
    G: Fn(Complex64) -> Result<(f64, f64)>,
{
    check_radius(r)?;
    let nodes = nodes.max(8);
    let mut values = Vec::with_capacity(nodes);
    let mut worst_err: f64 = 0.0;
    for j in 0..nodes {
        let (_, z) = circle_node(center, r, j, nodes);
        let (v, e) = g(z)?;
        worst_err = worst_err.max(e);
        values.push(v);
    }
    let mut peaks: Vec<usize> = (0..nodes)
        .filter(|&j| {
            let prev = values[(j + nodes - 1) % nodes];
            let next = values[(j + 1) % nodes];
            values[j] >= prev && values[j] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(3);
    let (mut best_phi, mut best) = {
        let j = peaks.first().copied().unwrap_or(0);
        (TAU * j as f64 / nodes as f64, values[j])
    };
    let step = TAU / nodes as f64;
    for &j in &peaks {
        let phi0 = TAU * j as f64 / nodes as f64;
        let mut h = |phi: f64| -> Result<f64> {
            let (v, e) = g(center + Complex64::from_polar(r, phi))?;
            worst_err = worst_err.max(e);
            Ok(v)
        };
        let (phi, v) = golden_max(&mut h, phi0 - step, phi0 + step, REFINEMENT_TOL)?;
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    Ok(CircleMaximum {
        value: best,
        phi: best_phi,
        point: center + Complex64::from_polar(r, best_phi),
        eval_error: worst_err,
        refinement_tol: REFINEMENT_TOL,
        nodes,
    })
}

/// `M(r, f) = max_{|z| = r} |f(z)|`, a certified lower estimate up to
/// evaluation error.
pub fn max_modulus(f: &FunctionHandle, r: f64) -> Result<CircleMaximum> {
    max_modulus_with_nodes(f, r, MAX_MODULUS_NODES)
}

pub fn max_modulus_with_nodes(f: &FunctionHandle, r: f64, nodes: usize) -> Result<CircleMaximum> {
    check_circle_in_domain(f, Complex64::new(0.0, 0.0), r)?;
    maximize_on_circle(Complex64::new(0.0, 0.0), r, nodes, |z| {
        let w = f.sample(z)?;
        Ok((w.value.norm(), w.abs_error))
    })
}

/// Residual of the Jensen identity
/// `log|f(0)| = (1/2pi) int log|f(rho e^{i phi})| - sum log(rho/|a|) + sum log(rho/|b|)`
/// over the given zeros `a` and poles `b` inside the circle.
pub fn jensen_residual(
    f: &FunctionHandle,
    rho: f64,
    zeros: &PointList,
    poles: &PointList,
    f_at_0: Complex64,
    target_err: f64,
) -> Result<JensenReport> {
    check_radius(rho)?;
    if !(target_err > 0.0) {
        return Err(Error::InvalidInput(format!(
            "target error must be positive, got {target_err}"
        )));
    }
    let f0 = f_at_0.norm();
    if !(f0 > 0.0) || !f0.is_finite() {
        return Err(Error::Precondition(format!(
            "f(0) = {f_at_0} must be finite and nonzero"
        )));
    }
    check_circle_in_domain(f, Complex64::new(0.0, 0.0), rho)?;
    let origin = Complex64::new(0.0, 0.0);
    check_clear_of_circle(zeros, origin, rho, "zero")?;
    check_clear_of_circle(poles, origin, rho, "pole")?;
    let divisor_sum = |points: &PointList, what: &str| -> Result<f64> {
        let mut s = 0.0;
        for p in points.entries() {
            let modulus = p.location.norm();
            if modulus == 0.0 {
                return Err(Error::Precondition(format!("{what} at the origin")));
            }
            if modulus > rho {
                return Err(Error::InvalidInput(format!(
                    "{what} at {} lies outside radius {rho}",
                    p.location
                )));
            }
            s += p.multiplicity as f64 * (rho / modulus).ln();
        }
        Ok(s)
    };
    let zero_sum = divisor_sum(zeros, "zero")?;
    let pole_sum = divisor_sum(poles, "pole")?;
    let mean = circle_mean_log_modulus(f, rho, target_err)?;
    let lhs = f0.ln();
    let rhs = mean.value - zero_sum + pole_sum;
    Ok(JensenReport {
        rho,
        lhs,
        circle_mean: mean.value,
        zero_sum,
        pole_sum,
        rhs,
        residual: (lhs - rhs).abs(),
        quad_error: mean.quad_error,
        eval_error: mean.eval_error,
        nodes: mean.nodes,
    })
}

/// `(1/2pi) int_0^{2pi} log |f(rho e^{i phi})| d phi` by the trapezoid rule
/// with node doubling, stopping once successive estimates agree to within
/// `target_err` plus twice the evaluation error.
pub fn circle_mean_log_modulus(f: &FunctionHandle, rho: f64, target_err: f64) -> Result<CircleIntegral> {
    let origin = Complex64::new(0.0, 0.0);
    let mut nodes = MIN_MEAN_NODES;
    let mut sum = 0.0;
    let mut worst: f64 = 0.0;
    let mut filled = 0usize;
    let mut prev: Option<f64> = None;
    loop {
        let stride = if filled == 0 { 1 } else { 2 };
        let first = if filled == 0 { 0 } else { 1 };
        for j in (first..nodes).step_by(stride) {
            let (_, z) = circle_node(origin, rho, j, nodes);
            let w = f.sample(z)?;
            let (l, e) = log_modulus(&w);
            if !l.is_finite() {
                return Err(Error::InvalidInput(format!("f vanishes on the circle at {z}")));
            }
            sum += l;
            worst = worst.max(e);
        }
        filled = nodes;
        let est = sum / nodes as f64;
        if let Some(p) = prev {
            let diff = (est - p).abs();
            if diff <= target_err + 2.0 * worst {
                return Ok(CircleIntegral {
                    value: est,
                    quad_error: diff,
                    eval_error: worst,
                    nodes,
                });
            }
            if nodes >= MAX_CIRCLE_NODES {
                return Err(Error::NoConvergence {
                    estimate: est,
                    achieved: diff,
                    nodes,
                });
            }
        }
        prev = Some(est);
        nodes *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_1_PI, LN_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn proximity_of_exponential_is_r_over_pi() {
        let f = FunctionHandle::exp_scaled(c(1.0, 0.0), c(1.0, 0.0));
        for r in [0.5, 1.0, 2.0, 3.0] {
            let m = proximity_m(&f, r, 1e-10).unwrap();
            assert!((m.value - r * FRAC_1_PI).abs() < 1e-9, "r = {r}: {m:?}");
        }
    }

    #[test]
    fn proximity_of_constants() {
        let m = proximity_m(&FunctionHandle::constant(c(0.5, 0.0)), 1.0, 1e-12).unwrap();
        assert_eq!(m.value, 0.0);
        let m = proximity_m(&FunctionHandle::constant(c(2.0, 0.0)), 1.0, 1e-12).unwrap();
        assert!((m.value - LN_2).abs() < 1e-14);
    }

    #[test]
    fn counting_function_cases() {
        let one = PointList::from_entries([(c(0.5, 0.0), 1)]).unwrap();
        assert!((counting_n(&one, 0, 1.0).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(counting_n(&PointList::new(), 0, 1.0).unwrap(), 0.0);
        assert!((counting_n(&PointList::new(), 2, E).unwrap() - 2.0).abs() < 1e-15);
        assert!(counting_n(&one, 0, 0.25).is_err());
    }

    #[test]
    fn max_modulus_spot_values() {
        let f = FunctionHandle::exp_scaled(c(1.0, 0.0), c(1.0, 0.0));
        let m = max_modulus(&f, 3.0).unwrap();
        assert!((m.value - 3f64.exp()).abs() < 1e-12 * 3f64.exp());
        let m = max_modulus(&FunctionHandle::power(2), 2.0).unwrap();
        assert!((m.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn jensen_exact_cases() {
        let a = c(0.4, -0.3);
        let f = FunctionHandle::polynomial_from_roots(c(1.0, 0.0), PointList::from_entries([(a, 1)]).unwrap());
        let zeros = PointList::from_entries([(a, 1)]).unwrap();
        let rep = jensen_residual(&f, 1.0, &zeros, &PointList::new(), -a, 1e-12).unwrap();
        assert!(rep.residual < 1e-9, "{rep:?}");
        let g = FunctionHandle::exp_scaled(c(1.0, 0.0), c(1.0, 0.0));
        let rep = jensen_residual(&g, 2.5, &PointList::new(), &PointList::new(), c(1.0, 0.0), 1e-12).unwrap();
        assert!(rep.residual < 1e-9, "{rep:?}");
    }

    #[test]
    fn jensen_rejects_divisor_on_circle() {
        let f = FunctionHandle::power(1).shifted(c(1.0, 0.0));
        let zeros = PointList::from_entries([(c(1.0, 0.0), 1)]).unwrap();
        assert!(jensen_residual(&f, 1.0, &zeros, &PointList::new(), c(-1.0, 0.0), 1e-10).is_err());
    }

    #[test]
    fn characteristic_counts_declared_poles() {
        let f = FunctionHandle::mobius(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(-0.5, 0.0)).unwrap();
        let rep = characteristic_t(&f, 1.0, 1e-10).unwrap();
        assert!((rep.n - 2f64.ln()).abs() < 1e-15);
        assert_eq!(rep.t, rep.m + rep.n);
    }
}
