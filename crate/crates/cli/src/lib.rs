//! Command-line front end: configuration, parallel sweeps over heights, and
//! JSON and CSV reports.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

pub use args::{Cli, Command};
pub use config::AuditConfig;
pub use error::{CliError, Result};
pub use report::{ReportDocument, EXIT_FAILED, EXIT_FINDINGS, EXIT_PASS, EXIT_USAGE};

use args::{AuditCommand, CommonArgs, FunctionArgs, NevanlinnaCommand, ZerosCommand, ZetaCommand};
use config::Spacing;

fn apply_common(cfg: &mut AuditConfig, a: &CommonArgs) -> Result<()> {
    if let Some(t) = a.t {
        if a.t_min.is_some() || a.t_max.is_some() || a.t_points.is_some() {
            return Err(CliError::Usage(
                "--t cannot be combined with --t-min, --t-max or --t-points".into(),
            ));
        }
        cfg.t_min = t;
        cfg.t_max = t;
        cfg.t_points = 1;
    }
    if let Some(x) = a.t_min {
        cfg.t_min = x;
    }
    if let Some(x) = a.t_max {
        cfg.t_max = x;
    }
    if let Some(n) = a.t_points {
        cfg.t_points = n;
    }
    if let Some(log) = a.log_spacing {
        cfg.spacing = if log { Spacing::Log } else { Spacing::Linear };
    }
    if let Some(s) = &a.sigma {
        cfg.sigma = Some(s.clone());
    }
    if let Some(c1) = a.c1 {
        cfg.c1 = c1;
    }
    if let Some(p) = a.precision {
        cfg.precision = p;
    }
    if let Some(j) = a.jobs {
        cfg.jobs = j;
    }
    if let Some(p) = &a.json {
        cfg.json = Some(p.clone());
    }
    if let Some(p) = &a.csv {
        cfg.csv = Some(p.clone());
    }
    Ok(())
}

fn apply_function(cfg: &mut AuditConfig, a: &FunctionArgs) {
    if let Some(f) = &a.function {
        cfg.function = Some(f.clone());
    }
    if let Some(r) = a.r {
        cfg.r = Some(r);
    }
}

fn apply_command(cfg: &mut AuditConfig, command: &Command) {
    match command {
        Command::Zeta(ZetaCommand::Eval(a)) => {
            if let Some(s) = a.s {
                cfg.s = Some(s);
            }
            if a.derivative {
                cfg.derivative = true;
            }
            if let Some(x) = a.target {
                cfg.eval_target = x;
            }
        }
        Command::Nevanlinna(
            NevanlinnaCommand::Characteristic(a) | NevanlinnaCommand::Proximity(a) | NevanlinnaCommand::Jensen(a),
        ) => apply_function(cfg, a),
        Command::Zeros(ZerosCommand::Count(a) | ZerosCommand::Locate(a)) => {
            apply_function(cfg, &a.function);
            if let Some(v) = a.value {
                cfg.value = v;
            }
            if let Some(tol) = a.tol {
                cfg.locate_tol = tol;
            }
        }
        Command::Audit(AuditCommand::TailSum(a)) => {
            if let Some(f) = a.tail {
                cfg.tail.function = f;
            }
            if let Some(x) = a.a {
                cfg.tail.a = x;
            }
            if let Some(n) = a.xi_max {
                cfg.tail.xi_max = n;
            }
        }
        _ => {}
    }
}

/// The configuration file, if any, overridden by the flags.
pub fn resolve_config(cli: &Cli) -> Result<AuditConfig> {
    let mut cfg = match &cli.common.config {
        Some(path) => AuditConfig::load(path)?,
        None => AuditConfig::default(),
    };
    apply_common(&mut cfg, &cli.common)?;
    apply_command(&mut cfg, &cli.command);
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand under a resolved configuration.
pub fn build_report(command: &Command, cfg: AuditConfig) -> Result<ReportDocument> {
    cfg.validate()?;
    let start = Instant::now();
    let outcome = commands::execute(command, &cfg)?;
    Ok(ReportDocument::new(
        command.name(),
        cfg,
        outcome,
        start.elapsed().as_secs_f64(),
    ))
}

fn emit(doc: &ReportDocument) -> Result<()> {
    match &doc.config.json {
        Some(path) => doc.write_json(path)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(doc.to_json().as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    if let Some(path) = &doc.config.csv {
        doc.write_csv_file(path)?;
    }
    let s = &doc.summary;
    eprintln!(
        "{}: {} verdicts, {} passed, {} failed, {} findings ({})",
        doc.command,
        s.verdicts,
        s.passed,
        s.failed,
        s.findings,
        format!("{:?}", s.status).to_lowercase()
    );
    Ok(())
}

/// Parses `args`, runs the command, writes its outputs, and returns the exit
/// code: 0 all pass, 2 a verdict failed, 3 findings, 1 usage or runtime error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let result = resolve_config(&cli).and_then(|cfg| build_report(&cli.command, cfg));
    match result.and_then(|doc| emit(&doc).map(|_| doc)) {
        Ok(doc) => doc.summary.status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
