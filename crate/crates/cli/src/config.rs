//! The audit configuration, its JSON form, and the parsers for complex
//! literals and catalog functions used on the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nevlab_core::audit::{log_spaced, ChainConfig, ChainRadii, TailFunction, DEFAULT_C1, MIN_HEIGHT};
use nevlab_core::zeta::{Precision, ZetaEvaluator};
use nevlab_core::{FunctionHandle, PointList, ZetaShift};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Environment variable holding the default number of worker threads.
pub const JOBS_ENV: &str = "NEVLAB_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Start, sample range and function for the sum-minus-integral audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailSpec {
    pub function: TailFunction,
    pub a: f64,
    pub xi_max: u64,
}

impl Default for TailSpec {
    fn default() -> Self {
        Self {
            function: TailFunction::InversePower { p: 2.0 },
            a: 1.0,
            xi_max: 100_000,
        }
    }
}

/// Everything that determines a run. A report echoes the resolved
/// configuration, so feeding the echo back reproduces the verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub spacing: Spacing,
    /// Real parts for the growth checks; each command has its own default.
    pub sigma: Option<Vec<f64>>,
    pub c1: f64,
    pub radii: Option<ChainRadii>,
    pub precision: Precision,
    pub jobs: usize,
    pub target_err: f64,
    pub locate_tol: f64,
    pub segment_points: usize,
    pub circle_nodes: usize,
    /// Argument of `zeta eval`.
    pub s: Option<Complex64>,
    pub derivative: bool,
    pub eval_target: f64,
    /// Function and radius for the `nevanlinna` and `zeros` commands.
    pub function: Option<FunctionSpec>,
    pub r: Option<f64>,
    /// The value `a` whose a-points are counted.
    pub value: Complex64,
    pub tail: TailSpec,
    /// Output paths are read from a config file but not echoed, so reports
    /// written to different places stay identical.
    #[serde(skip_serializing)]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub csv: Option<PathBuf>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let chain = ChainConfig::default();
        Self {
            t_min: MIN_HEIGHT,
            t_max: 1e6,
            t_points: 50,
            spacing: Spacing::Log,
            sigma: None,
            c1: DEFAULT_C1,
            radii: None,
            precision: chain.precision,
            jobs: default_jobs(),
            target_err: chain.target_err,
            locate_tol: chain.locate_tol,
            segment_points: chain.segment_points,
            circle_nodes: chain.circle_nodes,
            s: None,
            derivative: false,
            eval_target: 1e-12,
            function: None,
            r: None,
            value: Complex64::new(0.0, 0.0),
            tail: TailSpec::default(),
            json: None,
            csv: None,
        }
    }
}

/// `NEVLAB_JOBS` when set to a positive integer, else the available cores.
pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

impl AuditConfig {
    /// Reads a configuration file. A full report is accepted too, in which
    /// case its configuration echo is used.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        };
        let mut value: Value = serde_json::from_str(&text).map_err(parse_err)?;
        if value.get("schema_version").is_some() {
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
        }
        serde_json::from_value(value).map_err(parse_err)
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.t_points == 0 {
            return usage("t_points must be at least 1".into());
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite()) || self.t_min > self.t_max {
            return usage(format!("bad t range [{}, {}]", self.t_min, self.t_max));
        }
        if self.t_points > 1 && self.t_min == self.t_max {
            return usage("several t points need t_min < t_max".into());
        }
        if self.spacing == Spacing::Log && self.t_points > 1 && !(self.t_min > 0.0) {
            return usage("log spacing needs t_min > 0".into());
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return usage(format!("c1 must be positive, got {}", self.c1));
        }
        if self.jobs == 0 {
            return usage("jobs must be at least 1".into());
        }
        for (name, x) in [
            ("target_err", self.target_err),
            ("locate_tol", self.locate_tol),
            ("eval_target", self.eval_target),
        ] {
            if !(x > 0.0) {
                return usage(format!("{name} must be positive, got {x}"));
            }
        }
        if let Some(r) = &self.radii {
            r.validate()?;
        }
        Ok(())
    }

    /// Conditional audits are stated for `t >= 16` only.
    pub fn require_conditional_range(&self) -> Result<()> {
        if self.t_min < MIN_HEIGHT {
            return Err(CliError::Usage(format!(
                "this audit needs t >= {MIN_HEIGHT}, got t_min = {}",
                self.t_min
            )));
        }
        Ok(())
    }

    /// The heights, sorted ascending, with the endpoints exact.
    pub fn heights(&self) -> Vec<f64> {
        if self.t_points == 1 {
            return vec![self.t_min];
        }
        match self.spacing {
            Spacing::Log => log_spaced(self.t_min, self.t_max, self.t_points),
            Spacing::Linear => {
                let n = self.t_points;
                (0..n)
                    .map(|k| {
                        if k + 1 == n {
                            self.t_max
                        } else {
                            self.t_min + (self.t_max - self.t_min) * k as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn evaluator(&self) -> ZetaEvaluator {
        ZetaEvaluator::new(self.precision)
    }

    pub fn chain(&self) -> ChainConfig {
        let defaults = ChainConfig::default();
        ChainConfig {
            radii: self.radii.unwrap_or(defaults.radii),
            sigma_grid: self.sigma.clone().unwrap_or(defaults.sigma_grid),
            segment_points: self.segment_points,
            circle_nodes: self.circle_nodes,
            target_err: self.target_err,
            locate_tol: self.locate_tol,
            precision: self.precision,
        }
    }
}

/// `a`, `bi`, `a+bi` or `a-bi`, with optional exponents.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {s:?} as a complex number");
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = text.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(real(&text)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coefficient = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => real(other),
    };
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, coefficient(&body[k..])?)),
        None => Ok(Complex64::new(0.0, coefficient(body)?)),
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<Complex64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_complex).collect()
}

/// A function from the built-in catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `scale * exp(rate z)`.
    Exp { scale: Complex64, rate: Complex64 },
    /// `z^k`.
    Power { k: u32 },
    /// `lead * prod (z - root)`; repeated roots carry multiplicity.
    Polynomial { lead: Complex64, roots: Vec<Complex64> },
    /// `scale * prod (z - zero) / prod (z - pole)`.
    Rational {
        scale: Complex64,
        zeros: Vec<Complex64>,
        poles: Vec<Complex64>,
    },
    /// `(a z + b) / (c z + d)`.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `zeta(z + 4 + it)`.
    Zeta { t: f64 },
    /// The continued `log zeta(z + 4 + it)` on `|z| < radius`.
    LogZeta { t: f64, radius: f64 },
}

/// Radius of the default `log-zeta` domain, the zero-exclusion radius of the chain.
fn default_log_radius() -> f64 {
    ChainRadii::default().exclusion
}

impl FromStr for FunctionSpec {
    type Err = String;

    /// `exp`, `exp:RATE`, `exp:SCALE,RATE`, `power:K`, `poly:R1,R2,..`,
    /// `rational:Z1,Z2/P1,P2`, `mobius:A,B,C,D`, `zeta:T`,
    /// `log-zeta:T` or `log-zeta:T,RADIUS`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let one = Complex64::new(1.0, 0.0);
        let reals = |t: &str| -> std::result::Result<Vec<f64>, String> {
            t.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("cannot read {x:?} as a number"))
                })
                .collect()
        };
        match name {
            "exp" => match parse_list(args)?.as_slice() {
                [] => Ok(Self::Exp { scale: one, rate: one }),
                [rate] => Ok(Self::Exp {
                    scale: one,
                    rate: *rate,
                }),
                [scale, rate] => Ok(Self::Exp {
                    scale: *scale,
                    rate: *rate,
                }),
                _ => Err("exp takes at most a scale and a rate".into()),
            },
            "power" => args
                .trim()
                .parse::<u32>()
                .map(|k| Self::Power { k })
                .map_err(|_| format!("power needs a nonnegative integer exponent, got {args:?}")),
            "poly" => Ok(Self::Polynomial {
                lead: one,
                roots: parse_list(args)?,
            }),
            "rational" => {
                let (zeros, poles) = args.split_once('/').unwrap_or((args, ""));
                Ok(Self::Rational {
                    scale: one,
                    zeros: parse_list(zeros)?,
                    poles: parse_list(poles)?,
                })
            }
            "mobius" => match parse_list(args)?.as_slice() {
                [a, b, c, d] => Ok(Self::Mobius {
                    a: *a,
                    b: *b,
                    c: *c,
                    d: *d,
                }),
                _ => Err("mobius needs four coefficients".into()),
            },
            "zeta" => match reals(args)?.as_slice() {
                [t] => Ok(Self::Zeta { t: *t }),
                _ => Err("zeta needs the height t".into()),
            },
            "log-zeta" | "log_zeta" => match reals(args)?.as_slice() {
                [t] => Ok(Self::LogZeta {
                    t: *t,
                    radius: default_log_radius(),
                }),
                [t, radius] => Ok(Self::LogZeta { t: *t, radius: *radius }),
                _ => Err("log-zeta needs the height t and optionally a radius".into()),
            },
            other => Err(format!("unknown function {other:?}")),
        }
    }
}

fn multiset(points: &[Complex64]) -> Result<PointList> {
    Ok(PointList::from_entries(points.iter().map(|&z| (z, 1)))?)
}

impl FunctionSpec {
    pub fn handle(&self, evaluator: ZetaEvaluator) -> Result<FunctionHandle> {
        Ok(match self {
            Self::Exp { scale, rate } => FunctionHandle::exp_scaled(*scale, *rate),
            Self::Power { k } => FunctionHandle::power(*k),
            Self::Polynomial { lead, roots } => FunctionHandle::polynomial_from_roots(*lead, multiset(roots)?),
            Self::Rational { scale, zeros, poles } => {
                FunctionHandle::rational(*scale, multiset(zeros)?, multiset(poles)?)
            }
            Self::Mobius { a, b, c, d } => FunctionHandle::mobius(*a, *b, *c, *d)?,
            Self::Zeta { t } => ZetaShift::new(*t, evaluator).zeta_handle(),
            Self::LogZeta { t, radius } => ZetaShift::new(*t, evaluator).log_handle(*radius)?,
        })
    }
}

/// `inverse-power:P` or `log-over-fourth`.
pub fn parse_tail(s: &str) -> std::result::Result<TailFunction, String> {
    let (name, arg) = s.split_once(':').unwrap_or((s, ""));
    match name {
        "inverse-power" | "inverse_power" => arg
            .trim()
            .parse::<f64>()
            .map(|p| TailFunction::InversePower { p })
            .map_err(|_| format!("inverse-power needs an exponent, got {arg:?}")),
        "log-over-fourth" | "log_over_fourth" => Ok(TailFunction::LogOverFourth),
        other => Err(format!("unknown tail function {other:?}")),
    }
}
