//! The conditional growth chain at one height `t`: zero exclusion, the
//! disk bound on log zeta, counting of 1-points, the characteristic, the
//! maximum modulus and the final growth bound.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::constants::{ConstantsLedger, DEFAULT_DELTA};
use super::zeta_four::LOG_ZETA4_LOWER;
use crate::error::{Error, Result};
use crate::functions::{FunctionHandle, ZetaShift};
use crate::nevanlinna::{
    counting_n, jensen_residual, max_modulus_sandwich_check, maximize_on_circle, second_main_theorem_components,
    smt_verdict, CircleMaximum, SmtConfig, MAX_MODULUS_NODES,
};
use crate::types::{DiskSpec, EvalResult, PointList};
use crate::verdict::{Bound, LemmaVerdict};
use crate::zeros::{locate_with_count, winding_count_jittered};
use crate::zeta::{Precision, ZetaEvaluator};

/// Smallest height the chain is stated for.
pub const MIN_HEIGHT: f64 = 16.0;

/// Distance kept between the Jensen circle and every located zero.
const JENSEN_CLEARANCE: f64 = 0.005;

/// The largest radius in `[0.97 rho, rho]` on a grid of step `rho / 2000`
/// whose circle keeps `JENSEN_CLEARANCE` from `zeros`, or the grid radius
/// with the most clearance.
fn jensen_radius(zeros: &PointList, rho: f64) -> f64 {
    let clearance = |r: f64| {
        zeros
            .entries()
            .iter()
            .map(|p| (p.location.norm() - r).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let candidates = (0..=60).map(|j| rho * (1.0 - 5e-4 * j as f64));
    let mut best = (rho, clearance(rho));
    for r in candidates {
        let c = clearance(r);
        if c >= JENSEN_CLEARANCE {
            return r;
        }
        if c > best.1 {
            best = (r, c);
        }
    }
    best.0
}

/// The nested radii `7/2 - k delta`, `k = 1, 2, 3, 4`, about `4 + it`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRadii {
    /// Disk checked free of zeros of zeta; log zeta is analytic inside.
    pub exclusion: f64,
    /// Disk of the bound on log zeta and of the 1-point count.
    pub log_disk: f64,
    /// Radius of the characteristic.
    pub characteristic: f64,
    /// Radius of the maximum modulus.
    pub max_modulus: f64,
}

impl ChainRadii {
    pub fn from_delta(delta: f64) -> Self {
        Self {
            exclusion: 3.5 - delta,
            log_disk: 3.5 - 2.0 * delta,
            characteristic: 3.5 - 3.0 * delta,
            max_modulus: 3.5 - 4.0 * delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.max_modulus > 0.0
            && self.max_modulus < self.characteristic
            && self.characteristic < self.log_disk
            && self.log_disk < self.exclusion
            && self.exclusion < 4.0;
        if !ok {
            return Err(Error::InvalidInput(format!(
                "radii must satisfy 0 < max_modulus < characteristic < log_disk < exclusion < 4, got {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for ChainRadii {
    fn default() -> Self {
        Self::from_delta(DEFAULT_DELTA)
    }
}

/// Settings of one chain audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub radii: ChainRadii,
    /// Abscissae of the final growth check.
    pub sigma_grid: Vec<f64>,
    /// Points on the horizontal segment from `1/2 + 2 delta` to 4.
    pub segment_points: usize,
    /// Sampling nodes of each circle maximisation.
    pub circle_nodes: usize,
    /// Quadrature target of the characteristic and of the Jensen mean.
    pub target_err: f64,
    pub locate_tol: f64,
    pub precision: Precision,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            radii: ChainRadii::default(),
            sigma_grid: vec![0.54, 0.6, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0],
            segment_points: 64,
            circle_nodes: MAX_MODULUS_NODES,
            target_err: 1e-10,
            locate_tol: 1e-10,
            precision: Precision::Auto,
        }
    }
}

impl ChainConfig {
    fn validate(&self) -> Result<()> {
        self.radii.validate()?;
        if self.sigma_grid.is_empty() {
            return Err(Error::InvalidInput("sigma grid is empty".into()));
        }
        let lowest = 4.0 - self.radii.max_modulus;
        if let Some(s) = self
            .sigma_grid
            .iter()
            .find(|s| !(**s >= lowest - 1e-12) || !(**s <= 8.0))
        {
            return Err(Error::Precondition(format!("sigma = {s} lies outside [{lowest}, 8]")));
        }
        if self.segment_points < 2 || self.circle_nodes < 8 {
            return Err(Error::InvalidInput("segment needs 2 points and circles 8 nodes".into()));
        }
        if !(self.target_err > 0.0) || !(self.locate_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn evaluator(&self) -> ZetaEvaluator {
        ZetaEvaluator::new(self.precision)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// zeta vanishes inside the disk where log zeta must be analytic.
    ZeroInDisk,
    /// zeta came too close to zero along a continuation path.
    BranchObstruction,
    /// A contour could not be moved off an a-point.
    BoundaryObstruction,
}

/// Something the chain presupposes that turned out false at this height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub t: f64,
    pub radius: f64,
    pub count: u32,
    pub detail: String,
}

/// Verdicts and findings at one height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub t: f64,
    pub verdicts: Vec<LemmaVerdict>,
    pub findings: Vec<Finding>,
}

/// Which parts of the chain to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainStage {
    DiskBound,
    OnePoints,
    Growth,
    All,
}

struct DiskMeasure {
    circle: CircleMaximum,
    segment_max: f64,
    segment_sigma: f64,
    segment_err: f64,
    center: EvalResult,
}

impl DiskMeasure {
    fn max(&self) -> f64 {
        self.circle.value.max(self.segment_max)
    }

    fn err(&self) -> f64 {
        self.circle.eval_error.max(self.segment_err)
    }
}

struct Chain<'a> {
    t: f64,
    ledger: &'a ConstantsLedger,
    cfg: &'a ChainConfig,
    shift: Arc<ZetaShift>,
    zeta: FunctionHandle,
    report: ChainReport,
}

fn check_height(t: f64) -> Result<()> {
    if !(t >= MIN_HEIGHT) || !t.is_finite() {
        return Err(Error::Precondition(format!(
            "the chain needs t >= {MIN_HEIGHT}, got {t}"
        )));
    }
    Ok(())
}

impl<'a> Chain<'a> {
    fn new(t: f64, ledger: &'a ConstantsLedger, cfg: &'a ChainConfig) -> Result<Self> {
        check_height(t)?;
        cfg.validate()?;
        let shift = ZetaShift::new(t, cfg.evaluator());
        let zeta = shift.zeta_handle();
        Ok(Self {
            t,
            ledger,
            cfg,
            shift,
            zeta,
            report: ChainReport {
                t,
                verdicts: Vec::new(),
                findings: Vec::new(),
            },
        })
    }

    fn push(&mut self, v: LemmaVerdict) {
        let v = v.input("t", self.t);
        self.report.verdicts.push(v);
    }

    fn finding(&mut self, kind: FindingKind, radius: f64, count: u32, detail: String) {
        self.report.findings.push(Finding {
            kind,
            t: self.t,
            radius,
            count,
            detail,
        });
    }

    /// Counts zeros of zeta in the exclusion disk; false when there are any.
    fn exclude_zeros(&mut self) -> Result<bool> {
        let disk = DiskSpec::centered(self.cfg.radii.exclusion)?;
        let w = winding_count_jittered(&self.zeta, Complex64::new(0.0, 0.0), &disk)?;
        if w.count > 0 {
            self.finding(
                FindingKind::ZeroInDisk,
                w.disk.radius,
                w.count,
                format!(
                    "{} zero(s) of zeta within {} of 4 + {}i",
                    w.count, w.disk.radius, self.t
                ),
            );
            return Ok(false);
        }
        Ok(true)
    }

    fn log_zeta(&self) -> Result<FunctionHandle> {
        self.shift.log_handle(self.cfg.radii.exclusion)
    }

    fn measure_disk(&self, g: &FunctionHandle) -> Result<DiskMeasure> {
        let rho = self.cfg.radii.log_disk;
        let origin = Complex64::new(0.0, 0.0);
        let circle = maximize_on_circle(origin, rho, self.cfg.circle_nodes, |z| {
            let w = g.sample(z)?;
            Ok((w.value.norm(), w.abs_error))
        })?;
        let n = self.cfg.segment_points;
        let (mut segment_max, mut segment_sigma, mut segment_err) = (0.0f64, 4.0, 0.0f64);
        for k in 0..n {
            let x = -rho * k as f64 / (n - 1) as f64;
            let w = g.sample(Complex64::new(x, 0.0))?;
            segment_err = segment_err.max(w.abs_error);
            if w.value.norm() > segment_max {
                segment_max = w.value.norm();
                segment_sigma = 4.0 + x;
            }
        }
        let center = g.sample(origin)?;
        Ok(DiskMeasure {
            circle,
            segment_max,
            segment_sigma,
            segment_err,
            center,
        })
    }

    fn disk_verdicts(&mut self, g: &FunctionHandle, d: &DiskMeasure) -> Result<()> {
        let radii = self.cfg.radii;
        let origin = Complex64::new(0.0, 0.0);
        let real_max = maximize_on_circle(origin, radii.exclusion, self.cfg.circle_nodes, |z| {
            let w = self.zeta.sample(z)?;
            let m = w.value.norm();
            Ok((m.ln(), w.abs_error / (m - w.abs_error).max(f64::MIN_POSITIVE)))
        })?;
        let c1 = self.ledger.c1.value;
        self.push(
            LemmaVerdict::new(
                "log_modulus_disk_max",
                real_max.value,
                Bound::upper(0.5 * self.t.ln() + c1.ln()),
                real_max.eval_error,
            )
            .input("R", radii.exclusion)
            .input("c1", c1)
            .note("argmax", json!([real_max.point.re, real_max.point.im])),
        );
        let l0 = d.center.value;
        let deviation = maximize_on_circle(origin, radii.log_disk, self.cfg.circle_nodes, |z| {
            let w = g.sample(z)?;
            Ok(((w.value - l0).norm(), w.abs_error + d.center.abs_error))
        })?;
        let factor = 2.0 * radii.log_disk / (radii.exclusion - radii.log_disk);
        let rhs = factor * (real_max.value - l0.re);
        self.push(
            LemmaVerdict::new(
                "borel_caratheodory",
                deviation.value,
                Bound::upper(rhs),
                deviation.eval_error + factor * (real_max.eval_error + d.center.abs_error),
            )
            .input("R", radii.exclusion)
            .input("r", radii.log_disk)
            .note("A_R", real_max.value)
            .note("re_log_zeta_center", l0.re),
        );
        self.push(
            LemmaVerdict::new(
                "log_zeta_disk_bound",
                d.max(),
                Bound::upper(self.ledger.log_zeta_bound(self.t)),
                d.err(),
            )
            .input("rho", radii.log_disk)
            .input("sigma_min", 4.0 - radii.log_disk)
            .input("segment_points", self.cfg.segment_points as f64)
            .note("circle_max", d.circle.value)
            .note("circle_argmax", json!([d.circle.point.re, d.circle.point.im]))
            .note("segment_max", d.segment_max)
            .note("segment_argmax_sigma", d.segment_sigma)
            .note("circle_nodes", d.circle.nodes)
            .note("refinement_tol", d.circle.refinement_tol)
            .note("c2", self.ledger.c2.value)
            .note("c3", self.ledger.c3.value),
        );
        Ok(())
    }

    fn one_point_verdicts(&mut self, g: &FunctionHandle, d: &DiskMeasure) -> Result<()> {
        let rho = self.cfg.radii.log_disk;
        let disk = DiskSpec::centered(rho)?;
        let tol = self.cfg.locate_tol;
        let (ones, ones_disk) = locate_with_count(&self.zeta, Complex64::new(1.0, 0.0), &disk, tol)?;
        let n_ones = counting_n(&ones, 0, ones_disk.radius)?;
        let margin = DiskSpec::centered(0.5 * (rho + self.cfg.radii.exclusion))?;
        let (near_zeros, _) = locate_with_count(g, Complex64::new(0.0, 0.0), &margin, tol)?;
        let log_zeros = near_zeros.within(&disk);
        let zeros_disk = disk;
        let n_log = counting_n(&log_zeros, 0, zeros_disk.radius)?;
        let bound = self.ledger.one_point_bound(self.t);
        let locate_err = |points: &PointList| -> f64 {
            points
                .entries()
                .iter()
                .map(|p| p.multiplicity as f64 * tol / p.location.norm().max(tol))
                .fold(0.0, |acc, e| acc + e)
        };
        let ones_err = locate_err(&ones);
        let log_err = locate_err(&log_zeros);
        let off_branch = ones.total_multiplicity() as i64 - log_zeros.total_multiplicity() as i64;
        self.push(
            LemmaVerdict::new("one_point_counting", n_ones, Bound::upper(bound), ones_err)
                .input("rho", ones_disk.radius)
                .note("one_points", ones.total_multiplicity())
                .note("c4", self.ledger.c4.value),
        );
        self.push(
            LemmaVerdict::new("log_zero_counting", n_log, Bound::upper(bound), log_err)
                .input("rho", zeros_disk.radius)
                .note("log_zeta_zeros", log_zeros.total_multiplicity())
                .note("one_points_off_principal_branch", off_branch),
        );
        let jensen_rho = jensen_radius(&near_zeros, zeros_disk.radius);
        let jensen = jensen_residual(
            g,
            jensen_rho,
            &log_zeros.within(&DiskSpec::centered(jensen_rho)?),
            &PointList::new(),
            d.center.value,
            self.cfg.target_err,
        )?;
        let l0 = d.center.value.norm();
        let jensen_err = jensen.quad_error + jensen.eval_error + d.center.abs_error / l0 + log_err;
        self.push(
            LemmaVerdict::new("log_zeta_jensen", jensen.residual, Bound::upper(0.0), jensen_err)
                .input("rho", jensen.rho)
                .note("log_abs_log_zeta_center", jensen.lhs)
                .note("circle_mean", jensen.circle_mean)
                .note("zero_sum", jensen.zero_sum)
                .note("nodes", jensen.nodes),
        );
        let recomputed = (d.max() / LOG_ZETA4_LOWER).ln();
        let recomputed_err = d.err() / d.max();
        self.push(
            LemmaVerdict::new(
                "chain_soundness_log_zeros",
                n_log,
                Bound::upper(recomputed),
                log_err + recomputed_err,
            )
            .input("rho", zeros_disk.radius)
            .note("measured_disk_max", d.max())
            .note("expression", "ln(max |log zeta| / 0.0426)"),
        );
        self.push(
            LemmaVerdict::new(
                "chain_soundness",
                n_ones,
                Bound::upper(recomputed),
                ones_err + recomputed_err,
            )
            .input("rho", ones_disk.radius)
            .note("measured_disk_max", d.max())
            .note("expression", "ln(max |log zeta| / 0.0426)"),
        );
        Ok(())
    }

    fn growth_verdicts(&mut self) -> Result<()> {
        let radii = self.cfg.radii;
        let smt_cfg = SmtConfig {
            target_err: self.cfg.target_err,
            locate_tol: self.cfg.locate_tol,
        };
        let smt = second_main_theorem_components(&self.zeta, radii.log_disk, radii.characteristic, &smt_cfg)?;
        self.push(smt_verdict(self.zeta.label(), &smt));
        self.push(
            LemmaVerdict::new(
                "characteristic_growth",
                smt.characteristic.t,
                Bound::upper(self.ledger.characteristic_bound(self.t)),
                smt.characteristic.quad_error,
            )
            .input("r", radii.characteristic)
            .note("c5", self.ledger.c5.value),
        );
        let sandwich = max_modulus_sandwich_check(&self.zeta, radii.max_modulus, radii.characteristic)?;
        let log_m = sandwich.computed;
        let log_m_err = sandwich.error_estimate;
        self.push(sandwich);
        self.push(
            LemmaVerdict::new(
                "max_modulus_growth",
                log_m,
                Bound::upper(self.ledger.log_modulus_bound(self.t)),
                log_m_err,
            )
            .input("r", radii.max_modulus)
            .note("c6", self.ledger.c6.value)
            .note("c7", self.ledger.c7.value),
        );
        let (mut worst, mut worst_sigma, mut err) = (f64::NEG_INFINITY, 0.0, 0.0f64);
        let mut per_sigma = Vec::with_capacity(self.cfg.sigma_grid.len());
        for &sigma in &self.cfg.sigma_grid {
            let w = self.zeta.sample(Complex64::new(sigma - 4.0, 0.0))?;
            let m = w.value.norm();
            let l = m.ln();
            err = err.max(w.abs_error / (m - w.abs_error).max(f64::MIN_POSITIVE));
            per_sigma.push(json!([sigma, l]));
            if l > worst {
                worst = l;
                worst_sigma = sigma;
            }
        }
        self.push(
            LemmaVerdict::new(
                "zeta_growth",
                worst,
                Bound::upper(self.ledger.log_growth_bound(self.t)),
                err,
            )
            .input(
                "sigma_min",
                self.cfg.sigma_grid.iter().copied().fold(f64::INFINITY, f64::min),
            )
            .note("worst_sigma", worst_sigma)
            .note("log_modulus_by_sigma", per_sigma)
            .note("ln_c8", self.ledger.ln_c8.value)
            .note("c6", self.ledger.c6.value),
        );
        Ok(())
    }

    fn run(mut self, stage: ChainStage) -> Result<ChainReport> {
        match self.run_stages(stage) {
            Ok(()) => {}
            Err(Error::BranchObstruction { re, im, modulus }) => self.finding(
                FindingKind::BranchObstruction,
                self.cfg.radii.exclusion,
                0,
                format!("|zeta({re} + {im}i)| = {modulus:e} on a continuation path"),
            ),
            Err(Error::BoundaryObstruction { re, im, modulus }) => self.finding(
                FindingKind::BoundaryObstruction,
                self.cfg.radii.log_disk,
                0,
                format!("|f - a| = {modulus:e} at {re} + {im}i on every jittered contour"),
            ),
            Err(e) => return Err(e),
        }
        Ok(self.report)
    }

    fn run_stages(&mut self, stage: ChainStage) -> Result<()> {
        if !self.exclude_zeros()? {
            return Ok(());
        }
        let g = self.log_zeta()?;
        let disk = self.measure_disk(&g)?;
        if matches!(stage, ChainStage::DiskBound | ChainStage::All) {
            self.disk_verdicts(&g, &disk)?;
        }
        if matches!(stage, ChainStage::OnePoints | ChainStage::All) {
            self.one_point_verdicts(&g, &disk)?;
        }
        if matches!(stage, ChainStage::Growth | ChainStage::All) {
            self.growth_verdicts()?;
        }
        Ok(())
    }
}

/// Runs the chosen part of the chain at height `t >= 16`.
pub fn audit_chain_stage(
    t: f64,
    ledger: &ConstantsLedger,
    cfg: &ChainConfig,
    stage: ChainStage,
) -> Result<ChainReport> {
    Chain::new(t, ledger, cfg)?.run(stage)
}

/// Bound of `|log zeta|` on the disk about `4 + it` and on the segment
/// `[1/2 + 2 delta, 4] + it`, with the steps that produce it.
pub fn audit_log_zeta_disk_bound(t: f64, ledger: &ConstantsLedger, cfg: &ChainConfig) -> Result<ChainReport> {
    audit_chain_stage(t, ledger, cfg, ChainStage::DiskBound)
}

/// Counting function of the 1-points of zeta in the disk, the zeros of
/// log zeta, the Jensen identity for log zeta and the soundness checks.
pub fn audit_one_point_count(t: f64, ledger: &ConstantsLedger, cfg: &ChainConfig) -> Result<ChainReport> {
    audit_chain_stage(t, ledger, cfg, ChainStage::OnePoints)
}

/// Characteristic, maximum modulus and the growth bound on the sigma grid.
pub fn audit_growth_chain(t: f64, ledger: &ConstantsLedger, cfg: &ChainConfig) -> Result<ChainReport> {
    audit_chain_stage(t, ledger, cfg, ChainStage::Growth)
}

/// Every step of the chain at height `t`.
pub fn audit_chain(t: f64, ledger: &ConstantsLedger, cfg: &ChainConfig) -> Result<ChainReport> {
    audit_chain_stage(t, ledger, cfg, ChainStage::All)
}
