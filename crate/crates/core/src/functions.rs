//! Black-box analytic and meromorphic functions with per-call error bounds,
//! and a small catalog of concrete ones.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{DiskSpec, EvalResult, PointList, UNIT_ROUNDOFF};
use crate::zeta::{continue_arg, ZetaEvaluator, ZetaExpansions, OBSTRUCTION_THRESHOLD, PRINCIPAL_ABSCISSA};

pub type Evaluator = Arc<dyn Fn(Complex64, f64) -> Result<EvalResult> + Send + Sync>;

/// An evaluator for `f` and optionally `f'`, valid inside `domain`.
#[derive(Clone)]
pub struct FunctionHandle {
    label: String,
    evaluator: Evaluator,
    derivative: Option<Evaluator>,
    domain: DiskSpec,
    poles: Option<PointList>,
    sample_target: f64,
}

/// Accuracy requested from closed-form evaluators when sampling.
pub const DEFAULT_SAMPLE_TARGET: f64 = 1e-13;

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("has_derivative", &self.derivative.is_some())
            .field("poles", &self.poles)
            .finish()
    }
}

/// Closed-form value with a relative rounding bound of `ulps` units.
fn closed_form(value: Complex64, ulps: f64, target: f64) -> Result<EvalResult> {
    let r = EvalResult::rounded(value, ulps)?;
    if r.abs_error > target {
        return Err(Error::PrecisionExhausted {
            target,
            achieved: r.abs_error,
        });
    }
    Ok(r)
}

impl FunctionHandle {
    pub fn new<F>(label: impl Into<String>, domain: DiskSpec, evaluator: F) -> Self
    where
        F: Fn(Complex64, f64) -> Result<EvalResult> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            evaluator: Arc::new(evaluator),
            derivative: None,
            domain,
            poles: None,
            sample_target: DEFAULT_SAMPLE_TARGET,
        }
    }

    /// Absolute accuracy that sampling routines request from this function.
    pub fn with_sample_target(mut self, target: f64) -> Self {
        self.sample_target = target;
        self
    }

    pub fn sample_target(&self) -> f64 {
        self.sample_target
    }

    /// `f(z)` at the sampling accuracy, or the best the evaluator offers.
    pub fn sample(&self, z: Complex64) -> Result<EvalResult> {
        self.eval_best(z, self.sample_target)
    }

    pub fn sample_derivative(&self, z: Complex64) -> Result<EvalResult> {
        self.eval_derivative_best(z, self.sample_target)
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(Complex64, f64) -> Result<EvalResult> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Declares the complete pole divisor inside the domain.
    pub fn with_poles(mut self, poles: PointList) -> Self {
        self.poles = Some(poles);
        self
    }

    pub fn with_domain(mut self, domain: DiskSpec) -> Self {
        self.domain = domain;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &DiskSpec {
        &self.domain
    }

    pub fn declared_poles(&self) -> Option<&PointList> {
        self.poles.as_ref()
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, z: Complex64, target: f64) -> Result<EvalResult> {
        (self.evaluator)(z, target)
    }

    pub fn eval_derivative(&self, z: Complex64, target: f64) -> Result<EvalResult> {
        match &self.derivative {
            Some(d) => d(z, target),
            None => Err(Error::InvalidInput(format!(
                "{} has no derivative evaluator",
                self.label
            ))),
        }
    }

    /// Like [`eval`](Self::eval), but accepts the evaluator's best error
    /// when `target` is below what it can deliver at this point.
    pub fn eval_best(&self, z: Complex64, target: f64) -> Result<EvalResult> {
        relax(|tg| self.eval(z, tg), target)
    }

    pub fn eval_derivative_best(&self, z: Complex64, target: f64) -> Result<EvalResult> {
        relax(|tg| self.eval_derivative(z, tg), target)
    }

    /// `f - a` with the same derivative, domain and poles.
    pub fn shifted(&self, a: Complex64) -> FunctionHandle {
        if a == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        let inner = self.evaluator.clone();
        Self {
            label: format!("{} - ({a})", self.label),
            evaluator: Arc::new(move |z, tg| {
                let r = inner(z, 0.5 * tg)?;
                let v = r.value - a;
                let err = r.abs_error + UNIT_ROUNDOFF * v.norm();
                if err > tg {
                    return Err(Error::PrecisionExhausted {
                        target: tg,
                        achieved: err,
                    });
                }
                EvalResult::new(v, err)
            }),
            derivative: self.derivative.clone(),
            domain: self.domain,
            poles: self.poles.clone(),
            sample_target: self.sample_target,
        }
    }

    /// `scale * e^{rate z}`.
    pub fn exp_scaled(scale: Complex64, rate: Complex64) -> Self {
        let f = move |z: Complex64, tg: f64| {
            let w = rate * z;
            closed_form(scale * w.exp(), 4.0 + 2.0 * w.norm(), tg)
        };
        let d = move |z: Complex64, tg: f64| {
            let w = rate * z;
            closed_form(rate * scale * w.exp(), 6.0 + 2.0 * w.norm(), tg)
        };
        Self::new(format!("{scale}*exp({rate}*z)"), DiskSpec::whole_plane(), f).with_derivative(d)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("const {c}"), DiskSpec::whole_plane(), move |_, tg| {
            closed_form(c, 0.0, tg)
        })
        .with_derivative(|_, tg| closed_form(Complex64::new(0.0, 0.0), 0.0, tg))
        .with_poles(PointList::new())
    }

    /// `z^k`.
    pub fn power(k: u32) -> Self {
        let ulps = 2.0 * k as f64 + 2.0;
        let f = move |z: Complex64, tg: f64| closed_form(z.powu(k), ulps, tg);
        let d = move |z: Complex64, tg: f64| {
            let v = if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                z.powu(k - 1) * k as f64
            };
            closed_form(v, ulps + 2.0, tg)
        };
        Self::new(format!("z^{k}"), DiskSpec::whole_plane(), f)
            .with_derivative(d)
            .with_poles(PointList::new())
    }

    /// `lead * prod (z - a)^m` over the given roots.
    pub fn polynomial_from_roots(lead: Complex64, roots: PointList) -> Self {
        Self::rational(lead, roots, PointList::new())
    }

    /// `scale * prod (z - a)^m / prod (z - b)^n` with the poles declared.
    pub fn rational(scale: Complex64, zeros: PointList, poles: PointList) -> Self {
        let num: Vec<Complex64> = expand(&zeros);
        let den: Vec<Complex64> = expand(&poles);
        let ulps = 4.0 * (num.len() + den.len()) as f64 + 4.0;
        let (n1, d1) = (num.clone(), den.clone());
        let f = move |z: Complex64, tg: f64| {
            let p = product(&n1, z);
            let q = product(&d1, z);
            if q == Complex64::new(0.0, 0.0) {
                return Err(Error::OutOfDomain(format!("pole at {z}")));
            }
            closed_form(scale * p / q, ulps, tg)
        };
        let d = move |z: Complex64, tg: f64| {
            let p = product(&num, z);
            let q = product(&den, z);
            if q == Complex64::new(0.0, 0.0) {
                return Err(Error::OutOfDomain(format!("pole at {z}")));
            }
            let dp = product_derivative(&num, z);
            let dq = product_derivative(&den, z);
            closed_form(scale * (dp * q - p * dq) / (q * q), 2.0 * ulps + 8.0, tg)
        };
        let label = format!(
            "rational(scale {scale}, {} zeros, {} poles)",
            zeros.total_multiplicity(),
            poles.total_multiplicity()
        );
        Self::new(label, DiskSpec::whole_plane(), f)
            .with_derivative(d)
            .with_poles(poles)
    }

    /// `(a z + b) / (c z + d)`.
    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            return Err(Error::InvalidInput("degenerate Mobius map (ad - bc = 0)".into()));
        }
        let zero = Complex64::new(0.0, 0.0);
        let poles = if c == zero {
            PointList::new()
        } else {
            PointList::from_entries([(-d / c, 1)])?
        };
        let f = move |z: Complex64, tg: f64| {
            let q = c * z + d;
            if q == zero {
                return Err(Error::OutOfDomain(format!("pole at {z}")));
            }
            closed_form((a * z + b) / q, 10.0, tg)
        };
        let g = move |z: Complex64, tg: f64| {
            let q = c * z + d;
            if q == zero {
                return Err(Error::OutOfDomain(format!("pole at {z}")));
            }
            closed_form(det / (q * q), 12.0, tg)
        };
        Ok(
            Self::new(format!("({a}z + {b})/({c}z + {d})"), DiskSpec::whole_plane(), f)
                .with_derivative(g)
                .with_poles(poles),
        )
    }
}

fn relax<F: Fn(f64) -> Result<EvalResult>>(eval: F, target: f64) -> Result<EvalResult> {
    let mut tg = target;
    for _ in 0..3 {
        match eval(tg) {
            Err(Error::PrecisionExhausted { achieved, .. }) if achieved.is_finite() && achieved > tg => {
                tg = achieved * 1.5;
            }
            other => return other,
        }
    }
    eval(tg)
}

fn expand(points: &PointList) -> Vec<Complex64> {
    points
        .entries()
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.location, p.multiplicity as usize))
        .collect()
}

fn product(roots: &[Complex64], z: Complex64) -> Complex64 {
    roots.iter().fold(Complex64::new(1.0, 0.0), |acc, r| acc * (z - r))
}

fn product_derivative(roots: &[Complex64], z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..roots.len() {
        let mut p = Complex64::new(1.0, 0.0);
        for (j, r) in roots.iter().enumerate() {
            if j != i {
                p *= z - r;
            }
        }
        sum += p;
    }
    sum
}

/// Points with known `zeta` and continued argument, bucketed by grid cell.
type AnchorCache = HashMap<(i64, i64), Vec<(Complex64, Complex64, f64)>>;

/// Shared state for `zeta(z + 4 + it)` and its logarithm at one height.
pub struct ZetaShift {
    t: f64,
    base: Complex64,
    zeta: Arc<ZetaExpansions>,
    anchors: Mutex<AnchorCache>,
}

impl fmt::Debug for ZetaShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZetaShift").field("t", &self.t).finish_non_exhaustive()
    }
}

const ANCHOR_BUCKET: f64 = 0.1;
const ANCHOR_REACH: f64 = 0.15;
/// Target used for values that only steer branch continuation.
const PATH_TARGET: f64 = 1e-9;

impl ZetaShift {
    pub fn new(t: f64, evaluator: ZetaEvaluator) -> Arc<Self> {
        Arc::new(Self {
            t,
            base: Complex64::new(4.0, t),
            zeta: Arc::new(ZetaExpansions::new(evaluator, 1e-10)),
            anchors: Mutex::new(HashMap::new()),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Sampling accuracy that keeps evaluations on the cached fast path.
    pub fn sample_target(&self) -> f64 {
        if self.t.abs() < 5000.0 {
            1e-12
        } else {
            1e-9
        }
    }

    /// Largest disk about 0 on which the shift is evaluable.
    pub fn natural_radius(&self) -> f64 {
        5.0f64.min((self.base - 1.0).norm())
    }

    /// zeta(z + 4 + it) and its derivative.
    ///
    /// The value's error includes the rounding of `z + 4 + it`, which at
    /// large `t` dominates everything else.
    pub fn pair(&self, z: Complex64, target: f64) -> Result<(EvalResult, EvalResult)> {
        let s = z + self.base;
        let mut tg = 0.5 * target;
        let mut attempt = 0;
        let p = loop {
            match self.zeta.eval_pair(s, tg) {
                Err(Error::PrecisionExhausted { achieved, .. })
                    if attempt < 3 && achieved.is_finite() && achieved > tg =>
                {
                    tg = 1.5 * achieved;
                    attempt += 1;
                }
                other => break other?,
            }
        };
        let d = p.derivative.expect("pair carries derivative");
        let shift_err = UNIT_ROUNDOFF * s.norm() * (d.value.norm() + d.abs_error);
        let err = p.value.abs_error + shift_err;
        if err > target {
            return Err(Error::PrecisionExhausted { target, achieved: err });
        }
        let mut value = p.value;
        value.abs_error = err;
        Ok((value, d))
    }

    fn zeta_value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.zeta.eval_pair(z + self.base, PATH_TARGET)?.value.value)
    }

    fn bucket(z: Complex64) -> (i64, i64) {
        (
            (z.re / ANCHOR_BUCKET).floor() as i64,
            (z.im / ANCHOR_BUCKET).floor() as i64,
        )
    }

    fn nearest_anchor(&self, z: Complex64) -> Option<(Complex64, Complex64, f64)> {
        let (bx, by) = Self::bucket(z);
        let anchors = self.anchors.lock().expect("anchor cache");
        let mut best: Option<(f64, (Complex64, Complex64, f64))> = None;
        for dx in -2..=2 {
            for dy in -2..=2 {
                if let Some(list) = anchors.get(&(bx + dx, by + dy)) {
                    for a in list {
                        let d = (a.0 - z).norm();
                        if d <= ANCHOR_REACH && best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, *a));
                        }
                    }
                }
            }
        }
        best.map(|(_, a)| a)
    }

    fn remember(&self, z: Complex64, w: Complex64, arg: f64) {
        let mut anchors = self.anchors.lock().expect("anchor cache");
        anchors.entry(Self::bucket(z)).or_default().push((z, w, arg));
    }

    /// Continuous argument of zeta(z + 4 + it) on the branch fixed by
    /// horizontal continuation from the half-plane Re s >= 3/2.
    pub fn branch_arg(&self, z: Complex64) -> Result<f64> {
        let s = z + self.base;
        if s.re >= PRINCIPAL_ABSCISSA {
            return Ok(self.zeta_value(z)?.arg());
        }
        let eval = |u: Complex64| self.zeta_value(u);
        if let Some((za, wa, arga)) = self.nearest_anchor(z) {
            if za == z {
                return Ok(arga);
            }
            let (arg, w, _) = continue_arg(&eval, za, wa, arga, z, None)?;
            self.remember(z, w, arg);
            return Ok(arg);
        }
        let mut za = Complex64::new(PRINCIPAL_ABSCISSA - self.base.re, z.im);
        let mut wa = eval(za)?;
        let mut arga = wa.arg();
        let mut h = 0.25;
        while za.re > z.re {
            let zb = Complex64::new((za.re - h).max(z.re), z.im);
            let (arg, w, _) = continue_arg(&eval, za, wa, arga, zb, None)?;
            za = zb;
            wa = w;
            arga = arg;
            h = (2.0 * h).min(0.5);
        }
        self.remember(z, wa, arga);
        Ok(arga)
    }

    /// `log zeta(z + 4 + it)` on the continued branch, with its derivative.
    pub fn log_pair(&self, z: Complex64, target: f64) -> Result<(EvalResult, EvalResult)> {
        let mut tg = (0.25 * target).max(1e-12);
        loop {
            let (floor, (w, dw)) = match self.pair(z, tg) {
                Err(Error::PrecisionExhausted { achieved, .. }) if achieved.is_finite() => {
                    (true, self.pair(z, 1.5 * achieved)?)
                }
                other => (false, other?),
            };
            let m = w.value.norm();
            if m < OBSTRUCTION_THRESHOLD {
                let s = z + self.base;
                return Err(Error::BranchObstruction {
                    re: s.re,
                    im: s.im,
                    modulus: m,
                });
            }
            let e = crate::zeta::log_error(m, w.abs_error);
            let slack = m - w.abs_error;
            let de = if slack > 0.0 {
                (dw.abs_error * m + dw.value.norm() * w.abs_error) / (m * slack)
                    + 4.0 * UNIT_ROUNDOFF * dw.value.norm() / m
            } else {
                f64::INFINITY
            };
            if e.max(de) <= target || tg <= 1e-12 || floor {
                if e > target {
                    return Err(Error::PrecisionExhausted { target, achieved: e });
                }
                let arg = crate::zeta::align_arg(w.value.arg(), self.branch_arg(z)?);
                let value = EvalResult::new(Complex64::new(m.ln(), arg), e)?;
                let derivative = EvalResult::new(dw.value / w.value, de.min(f64::MAX))?;
                return Ok((value, derivative));
            }
            tg = (0.25 * target * m).max(1e-12).min(0.5 * tg);
        }
    }

    /// Handle for `zeta(z + 4 + it)` on its natural disk.
    pub fn zeta_handle(self: &Arc<Self>) -> FunctionHandle {
        let (a, b) = (self.clone(), self.clone());
        let domain = DiskSpec::centered(self.natural_radius()).expect("positive radius");
        FunctionHandle::new(format!("zeta(z + 4 + {}i)", self.t), domain, move |z, tg| {
            Ok(a.pair(z, tg)?.0)
        })
        .with_derivative(move |z, tg| Ok(b.pair(z, tg)?.1))
        .with_poles(PointList::new())
        .with_sample_target(self.sample_target())
    }

    /// Handle for the continued `log zeta(z + 4 + it)` on `|z| < radius`;
    /// the radius must not reach a zero of zeta.
    pub fn log_handle(self: &Arc<Self>, radius: f64) -> Result<FunctionHandle> {
        if !(radius > 0.0) || radius > self.natural_radius() {
            return Err(Error::InvalidInput(format!("log zeta radius {radius} out of range")));
        }
        let (a, b) = (self.clone(), self.clone());
        let domain = DiskSpec::centered(radius)?;
        Ok(
            FunctionHandle::new(format!("log zeta(z + 4 + {}i)", self.t), domain, move |z, tg| {
                Ok(a.log_pair(z, tg)?.0)
            })
            .with_derivative(move |z, tg| Ok(b.log_pair(z, tg)?.1))
            .with_poles(PointList::new())
            .with_sample_target(4.0 * self.sample_target()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::log_zeta_tracked;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_derivative(f: &FunctionHandle, radius: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let z = Complex64::from_polar(
                radius * rng.random::<f64>().sqrt(),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            let h = 1e-5;
            let fp = f.eval_best(z + h, 1e-14).unwrap().value;
            let fm = f.eval_best(z - h, 1e-14).unwrap().value;
            let fd = (fp - fm) / (2.0 * h);
            let d = f.eval_derivative_best(z, 1e-14).unwrap().value;
            assert!(
                (d - fd).norm() <= 1e-6 * d.norm().max(1.0),
                "{}: {d} vs {fd}",
                f.label()
            );
        }
    }

    #[test]
    fn catalog_derivatives_match_finite_differences() {
        check_derivative(&FunctionHandle::exp_scaled(c(2.0, 0.0), c(1.0, 0.0)), 2.0, 1);
        check_derivative(&FunctionHandle::power(3), 2.0, 2);
        let roots = PointList::from_entries([(c(0.3, 0.1), 2), (c(-0.5, 0.0), 1)]).unwrap();
        check_derivative(
            &FunctionHandle::polynomial_from_roots(c(1.5, 0.0), roots.clone()),
            1.0,
            3,
        );
        let poles = PointList::from_entries([(c(2.0, 0.5), 1)]).unwrap();
        check_derivative(&FunctionHandle::rational(c(1.0, 0.0), roots, poles), 1.0, 4);
        check_derivative(
            &FunctionHandle::mobius(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).unwrap(),
            1.0,
            5,
        );
        let shift = ZetaShift::new(20.0, ZetaEvaluator::default());
        check_derivative(&shift.zeta_handle(), 3.0, 6);
        check_derivative(&shift.log_handle(3.49).unwrap(), 3.0, 7);
    }

    #[test]
    fn mobius_declares_pole() {
        let f = FunctionHandle::mobius(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).unwrap();
        let poles = f.declared_poles().unwrap();
        assert_eq!(poles.len(), 1);
        assert!((poles.entries()[0].location - 2.0).norm() < 1e-15);
        assert!(f.eval(c(2.0, 0.0), 1e-10).is_err());
        assert!(FunctionHandle::mobius(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn log_shift_agrees_with_horizontal_tracking() {
        let shift = ZetaShift::new(30.0, ZetaEvaluator::default());
        let g = shift.log_handle(3.49).unwrap();
        for &z in &[c(-3.46, 0.0), c(-2.0, 1.5), c(0.5, -3.0), c(-3.0, -1.0)] {
            let a = g.eval(z, 1e-9).unwrap();
            let b = log_zeta_tracked(4.0 + z.re, 30.0 + z.im, 1e-9).unwrap();
            assert!(
                (a.value - b.value).norm() <= a.abs_error + b.abs_error,
                "{z}: {a:?} {b:?}"
            );
        }
    }

    #[test]
    fn shifted_handle_subtracts() {
        let f = FunctionHandle::power(2).shifted(c(0.25, 0.0));
        assert!(f.eval(c(0.5, 0.0), 1e-12).unwrap().value.norm() < 1e-15);
    }
}
