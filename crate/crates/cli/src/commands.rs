//! What each subcommand computes.

use std::time::Instant;

use nevlab_core::audit::{
    audit_chain, audit_half_power_growth, audit_log_zeta_disk_bound, audit_one_point_count, audit_tail_function,
    audit_zeta_at_four, tail_verdicts, zeta_at_four_constants, ChainConfig, ChainReport, ConstantsLedger,
};
use nevlab_core::nevanlinna::{characteristic_t, jensen_residual, proximity_m};
use nevlab_core::zeros::{locate_with_count, winding_count_jittered};
use nevlab_core::{Bound, DiskSpec, FunctionHandle, LemmaVerdict, PointList};
use num_complex::Complex64;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use serde_json::json;

use crate::args::{AuditCommand, Command, NevanlinnaCommand, ZerosCommand, ZetaCommand};
use crate::config::{AuditConfig, FunctionSpec};
use crate::error::{CliError, Result};
use crate::report::{Outcome, PointTiming};

/// Real parts of the default half-power growth grid.
pub const GROWTH_SIGMAS: [f64; 5] = [0.5, 0.54, 1.0, 2.0, 4.0];

/// Largest relative discrepancy tolerated when the ledger re-derives itself.
pub const LEDGER_TOLERANCE: f64 = 1e-12;

/// Per-height work on a pool of `cfg.jobs` threads, collected in height order.
struct Runner {
    pool: ThreadPool,
    heights: Vec<f64>,
}

impl Runner {
    fn new(cfg: &AuditConfig) -> Result<Self> {
        Ok(Self {
            pool: ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?,
            heights: cfg.heights(),
        })
    }

    fn per_height<T, F>(&self, f: F) -> Result<Vec<(f64, T, f64)>>
    where
        T: Send,
        F: Fn(f64) -> nevlab_core::Result<T> + Sync,
    {
        let results: Vec<_> = self.pool.install(|| {
            self.heights
                .par_iter()
                .map(|&t| {
                    let start = Instant::now();
                    let r = f(t);
                    (t, r, start.elapsed().as_secs_f64())
                })
                .collect()
        });
        results
            .into_iter()
            .map(|(t, r, s)| r.map(|v| (t, v, s)).map_err(CliError::from))
            .collect()
    }

    fn global<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        self.pool.install(f)
    }
}

pub fn execute(command: &Command, cfg: &AuditConfig) -> Result<Outcome> {
    match command {
        Command::Zeta(ZetaCommand::Eval(_)) => zeta_eval(cfg),
        Command::Nevanlinna(NevanlinnaCommand::Characteristic(_)) => characteristic(cfg),
        Command::Nevanlinna(NevanlinnaCommand::Proximity(_)) => proximity(cfg),
        Command::Nevanlinna(NevanlinnaCommand::Jensen(_)) => jensen(cfg),
        Command::Zeros(ZerosCommand::Count(_)) => count(cfg),
        Command::Zeros(ZerosCommand::Locate(_)) => locate(cfg),
        Command::Audit(AuditCommand::TailSum(_)) => tail_sum(cfg),
        Command::Audit(AuditCommand::ZetaAtFour) => zeta_at_four(cfg),
        Command::Audit(AuditCommand::HalfPowerGrowth) => half_power_growth(cfg),
        Command::Audit(AuditCommand::DiskBound) => chain_audit(cfg, audit_log_zeta_disk_bound),
        Command::Audit(AuditCommand::OnePoints) => chain_audit(cfg, audit_one_point_count),
        Command::Audit(AuditCommand::Chain) => chain_audit(cfg, audit_chain),
        Command::Audit(AuditCommand::Constants) => constants(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn zeta_eval(cfg: &AuditConfig) -> Result<Outcome> {
    let s = cfg.s.ok_or_else(|| CliError::Usage("zeta eval needs --s".into()))?;
    let order = u8::from(cfg.derivative);
    let w = cfg.evaluator().eval(s, order, cfg.eval_target)?;
    Ok(Outcome {
        measurements: Some(json!({
            "s": s,
            "derivative_order": order,
            "value": w.value,
            "abs_error": w.abs_error,
            "provenance": w.provenance,
        })),
        ..Outcome::default()
    })
}

fn function_and_radius(cfg: &AuditConfig) -> Result<(&FunctionSpec, FunctionHandle, f64)> {
    let spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --function".into()))?;
    let r = cfg.r.ok_or_else(|| CliError::Usage("this command needs --r".into()))?;
    Ok((spec, spec.handle(cfg.evaluator())?, r))
}

fn characteristic(cfg: &AuditConfig) -> Result<Outcome> {
    let (_, f, r) = function_and_radius(cfg)?;
    let report = characteristic_t(&f, r, cfg.target_err)?;
    Ok(Outcome {
        measurements: Some(json!({ "function": f.label(), "characteristic": report })),
        ..Outcome::default()
    })
}

fn proximity(cfg: &AuditConfig) -> Result<Outcome> {
    let (_, f, r) = function_and_radius(cfg)?;
    let m = proximity_m(&f, r, cfg.target_err)?;
    Ok(Outcome {
        measurements: Some(json!({ "function": f.label(), "r": r, "proximity": m })),
        ..Outcome::default()
    })
}

fn jensen(cfg: &AuditConfig) -> Result<Outcome> {
    let (_, f, r) = function_and_radius(cfg)?;
    let origin = Complex64::new(0.0, 0.0);
    let (zeros, disk) = locate_with_count(&f, origin, &DiskSpec::centered(r)?, cfg.locate_tol)?;
    let rho = disk.radius;
    let poles = f
        .declared_poles()
        .map(|p| p.within(&disk))
        .unwrap_or_else(PointList::new);
    let f0 = f.eval_best(origin, cfg.target_err)?;
    let report = jensen_residual(&f, rho, &zeros, &poles, f0.value, cfg.target_err)?;
    let nearest = zeros
        .entries()
        .iter()
        .chain(poles.entries())
        .map(|p| p.location.norm())
        .fold(rho, f64::min);
    let divisor_err = (zeros.total_multiplicity() as f64) * cfg.locate_tol / nearest;
    let err = report.quad_error + report.eval_error + f0.abs_error / f0.value.norm() + divisor_err;
    let verdict = LemmaVerdict::new("jensen_identity", report.residual, Bound::upper(0.0), err)
        .input("rho", rho)
        .note("function", f.label())
        .note("zeros", zeros.total_multiplicity())
        .note("poles", poles.total_multiplicity());
    let mut out = Outcome {
        measurements: Some(json!({ "function": f.label(), "jensen": report, "zeros": zeros, "poles": poles })),
        ..Outcome::default()
    };
    out.push(None, [verdict]);
    Ok(out)
}

fn count(cfg: &AuditConfig) -> Result<Outcome> {
    let (_, f, r) = function_and_radius(cfg)?;
    let w = winding_count_jittered(&f, cfg.value, &DiskSpec::centered(r)?)?;
    Ok(Outcome {
        measurements: Some(json!({ "function": f.label(), "value": cfg.value, "winding": w })),
        ..Outcome::default()
    })
}

fn locate(cfg: &AuditConfig) -> Result<Outcome> {
    let (_, f, r) = function_and_radius(cfg)?;
    let (points, disk) = locate_with_count(&f, cfg.value, &DiskSpec::centered(r)?, cfg.locate_tol)?;
    Ok(Outcome {
        measurements: Some(json!({
            "function": f.label(),
            "value": cfg.value,
            "disk": disk,
            "count": points.total_multiplicity(),
            "points": points,
        })),
        ..Outcome::default()
    })
}

fn tail_sum(cfg: &AuditConfig) -> Result<Outcome> {
    let tail = cfg.tail;
    let result = audit_tail_function(tail.function, tail.a, tail.xi_max)?;
    let mut out = Outcome {
        measurements: Some(json!({ "tail": result })),
        ..Outcome::default()
    };
    out.push(None, tail_verdicts(&tail.function.label(), &result));
    Ok(out)
}

fn zeta_at_four_into(out: &mut Outcome, runner: &Runner, cfg: &AuditConfig) -> Result<()> {
    let ev = cfg.evaluator();
    for (t, verdicts, seconds) in runner.per_height(|t| audit_zeta_at_four(t, &ev))? {
        out.push(Some(t), verdicts);
        out.per_t.push(PointTiming { t, seconds });
    }
    Ok(())
}

fn zeta_at_four(cfg: &AuditConfig) -> Result<Outcome> {
    let runner = Runner::new(cfg)?;
    let mut out = Outcome::default();
    zeta_at_four_into(&mut out, &runner, cfg)?;
    Ok(out)
}

fn half_power_growth_into(out: &mut Outcome, runner: &Runner, cfg: &AuditConfig) -> Result<()> {
    let sigmas = cfg.sigma.clone().unwrap_or_else(|| GROWTH_SIGMAS.to_vec());
    let ev = cfg.evaluator();
    let audit = runner.global(|| audit_half_power_growth(&sigmas, &runner.heights, cfg.c1, &ev))?;
    out.measurements = Some(json!({
        "empirical_c1": audit.empirical_c1,
        "worst_sigma": audit.worst_sigma,
        "worst_t": audit.worst_t,
    }));
    out.push(None, [audit.verdict]);
    Ok(())
}

fn half_power_growth(cfg: &AuditConfig) -> Result<Outcome> {
    let runner = Runner::new(cfg)?;
    let mut out = Outcome::default();
    half_power_growth_into(&mut out, &runner, cfg)?;
    Ok(out)
}

fn ledger_verdict(ledger: &ConstantsLedger) -> Result<LemmaVerdict> {
    Ok(LemmaVerdict::new(
        "constants_self_consistency",
        ledger.recompute_discrepancy()?,
        Bound::upper(LEDGER_TOLERANCE),
        0.0,
    )
    .input("c1", ledger.c1.value))
}

fn constants(cfg: &AuditConfig) -> Result<Outcome> {
    let ledger = ConstantsLedger::derive(cfg.c1)?;
    let mut out = Outcome::default();
    out.push(None, [ledger_verdict(&ledger)?]);
    out.push(None, zeta_at_four_constants()?);
    out.ledger = Some(ledger);
    Ok(out)
}

type ChainAudit = fn(f64, &ConstantsLedger, &ChainConfig) -> nevlab_core::Result<ChainReport>;

fn chain_into(
    out: &mut Outcome,
    runner: &Runner,
    cfg: &AuditConfig,
    ledger: &ConstantsLedger,
    audit: ChainAudit,
) -> Result<()> {
    let chain = cfg.chain();
    for (t, report, seconds) in runner.per_height(|t| audit(t, ledger, &chain))? {
        out.push(Some(t), report.verdicts);
        out.findings.extend(report.findings);
        out.per_t.push(PointTiming { t, seconds });
    }
    Ok(())
}

fn chain_audit(cfg: &AuditConfig, audit: ChainAudit) -> Result<Outcome> {
    cfg.require_conditional_range()?;
    let runner = Runner::new(cfg)?;
    let ledger = ConstantsLedger::derive(cfg.c1)?;
    let mut out = Outcome::default();
    chain_into(&mut out, &runner, cfg, &ledger, audit)?;
    out.ledger = Some(ledger);
    Ok(out)
}

/// The per-height checks, then the checks that do not depend on a height.
fn sweep(cfg: &AuditConfig) -> Result<Outcome> {
    cfg.require_conditional_range()?;
    let runner = Runner::new(cfg)?;
    let ledger = ConstantsLedger::derive(cfg.c1)?;
    let mut four = Outcome::default();
    zeta_at_four_into(&mut four, &runner, cfg)?;
    let mut out = Outcome::default();
    chain_into(&mut out, &runner, cfg, &ledger, audit_chain)?;
    let mut rows = four.verdicts;
    rows.append(&mut out.verdicts);
    rows.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite heights"));
    out.verdicts = rows;
    for (p, q) in out.per_t.iter_mut().zip(&four.per_t) {
        p.seconds += q.seconds;
    }
    half_power_growth_into(&mut out, &runner, cfg)?;
    out.push(None, zeta_at_four_constants()?);
    out.push(None, [ledger_verdict(&ledger)?]);
    out.ledger = Some(ledger);
    Ok(out)
}
