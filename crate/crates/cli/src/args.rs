use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nevlab_core::audit::TailFunction;
use nevlab_core::zeta::Precision;
use num_complex::Complex64;

use crate::config::{parse_complex, parse_tail, FunctionSpec};

#[derive(Debug, Parser)]
#[command(
    name = "nevlab",
    version,
    about = "Nevanlinna functionals and explicit-bound audits for zeta"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Single height; shorthand for --t-min T --t-max T --t-points 1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,

    #[arg(long, global = true)]
    pub t_min: Option<f64>,

    #[arg(long, global = true)]
    pub t_max: Option<f64>,

    #[arg(long, global = true)]
    pub t_points: Option<usize>,

    /// Space heights evenly in ln t (pass `false` for linear spacing).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub log_spacing: Option<bool>,

    /// Comma-separated real parts for the growth checks.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,

    /// Constant in |zeta(sigma + it)| <= c1 |t|^{1/2}.
    #[arg(long, global = true)]
    pub c1: Option<f64>,

    /// double, double_double or auto.
    #[arg(long, global = true, value_parser = parse_precision)]
    pub precision: Option<Precision>,

    /// Worker threads; defaults to NEVLAB_JOBS or the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,

    /// Write one CSV row per verdict here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,

    /// JSON configuration, or an earlier report whose config echo is reused.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: nevlab_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Riemann zeta function.
    #[command(subcommand)]
    Zeta(ZetaCommand),
    /// Nevanlinna functionals of a catalog function.
    #[command(subcommand)]
    Nevanlinna(NevanlinnaCommand),
    /// Count or locate a-points of a catalog function in a disk.
    #[command(subcommand)]
    Zeros(ZerosCommand),
    /// Check the explicit bounds of the growth chain.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Run the per-height checks and the global checks together.
    Sweep,
}

#[derive(Debug, Subcommand)]
pub enum ZetaCommand {
    /// zeta(s) or zeta'(s) with a guaranteed error bound.
    Eval(ZetaEvalArgs),
}

#[derive(Debug, Args)]
pub struct ZetaEvalArgs {
    /// The argument, e.g. `4`, `0.5+14.1347i`.
    #[arg(long = "s", value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: Option<Complex64>,

    /// Evaluate zeta' instead of zeta.
    #[arg(long)]
    pub derivative: bool,

    /// Absolute error target.
    #[arg(long)]
    pub target: Option<f64>,
}

/// A catalog function and a radius.
#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// exp[:RATE|:SCALE,RATE], power:K, poly:R1,.., rational:Z1,../P1,..,
    /// mobius:A,B,C,D, zeta:T or log-zeta:T[,RADIUS].
    #[arg(long, allow_hyphen_values = true)]
    pub function: Option<FunctionSpec>,

    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum NevanlinnaCommand {
    /// The characteristic T(r, f) = m(r, f) + N(r, f).
    #[command(name = "T", alias = "t")]
    Characteristic(FunctionArgs),
    /// The proximity function m(r, f).
    #[command(name = "m")]
    Proximity(FunctionArgs),
    /// Residual of the Jensen identity on |z| = r.
    Jensen(FunctionArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub function: FunctionArgs,

    /// The value a whose a-points are sought.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub value: Option<Complex64>,

    /// Location tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum ZerosCommand {
    /// Number of a-points in |z| < r, with multiplicity.
    Count(PointArgs),
    /// Positions and multiplicities of the a-points in |z| < r.
    Locate(PointArgs),
}

#[derive(Debug, Args)]
pub struct TailArgs {
    /// inverse-power:P or log-over-fourth.
    #[arg(long, value_parser = parse_tail)]
    pub tail: Option<TailFunction>,

    /// Start of the sum and of the integral.
    #[arg(long)]
    pub a: Option<f64>,

    /// Largest upper limit checked.
    #[arg(long)]
    pub xi_max: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum AuditCommand {
    /// Sum minus integral of a decreasing function converges with the stated tail.
    #[command(name = "lemma4")]
    TailSum(TailArgs),
    /// Bounds on zeta, log zeta and zeta' along Re s = 4.
    #[command(name = "lemma5")]
    ZetaAtFour,
    /// |zeta(sigma + it)| <= c1 |t|^{1/2} on a sample grid.
    #[command(name = "lemma6")]
    HalfPowerGrowth,
    /// Bound on |log zeta| in the disk about 4 + it.
    #[command(name = "lemma8")]
    DiskBound,
    /// Count of 1-points of log zeta in the disk about 4 + it.
    #[command(name = "lemma9")]
    OnePoints,
    /// Every check of the growth chain.
    Chain,
    /// The constants ledger and its self-consistency.
    Constants,
}

impl Command {
    /// The subcommand path, as recorded in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Zeta(ZetaCommand::Eval(_)) => "zeta eval",
            Self::Nevanlinna(NevanlinnaCommand::Characteristic(_)) => "nevanlinna T",
            Self::Nevanlinna(NevanlinnaCommand::Proximity(_)) => "nevanlinna m",
            Self::Nevanlinna(NevanlinnaCommand::Jensen(_)) => "nevanlinna jensen",
            Self::Zeros(ZerosCommand::Count(_)) => "zeros count",
            Self::Zeros(ZerosCommand::Locate(_)) => "zeros locate",
            Self::Audit(AuditCommand::TailSum(_)) => "audit lemma4",
            Self::Audit(AuditCommand::ZetaAtFour) => "audit lemma5",
            Self::Audit(AuditCommand::HalfPowerGrowth) => "audit lemma6",
            Self::Audit(AuditCommand::DiskBound) => "audit lemma8",
            Self::Audit(AuditCommand::OnePoints) => "audit lemma9",
            Self::Audit(AuditCommand::Chain) => "audit chain",
            Self::Audit(AuditCommand::Constants) => "audit constants",
            Self::Sweep => "sweep",
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn parser_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "nevlab",
            "audit",
            "chain",
            "--t-min",
            "16",
            "--t-points",
            "3",
            "--log-spacing",
        ])
        .unwrap();
        assert_eq!(cli.common.t_min, Some(16.0));
        assert_eq!(cli.common.t_points, Some(3));
        assert_eq!(cli.common.log_spacing, Some(true));
        assert_eq!(cli.command.name(), "audit chain");
    }

    #[test]
    fn complex_and_function_arguments() {
        let cli = Cli::try_parse_from(["nevlab", "zeta", "eval", "--s", "-2+1i"]).unwrap();
        let Command::Zeta(ZetaCommand::Eval(a)) = cli.command else {
            panic!("expected zeta eval");
        };
        assert_eq!(a.s, Some(Complex64::new(-2.0, 1.0)));
        let cli = Cli::try_parse_from(["nevlab", "nevanlinna", "T", "--function", "exp", "--r", "2"]).unwrap();
        assert_eq!(cli.command.name(), "nevanlinna T");
        let cli = Cli::try_parse_from(["nevlab", "--sigma", "0.5,1,2", "audit", "lemma6"]).unwrap();
        assert_eq!(cli.common.sigma, Some(vec![0.5, 1.0, 2.0]));
    }

    #[test]
    fn rejects_unknown_flags() {
        assert!(Cli::try_parse_from(["nevlab", "audit", "lemma5", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["nevlab", "audit", "lemma7"]).is_err());
    }
}
