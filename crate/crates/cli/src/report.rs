//! The machine-readable report and its CSV projection.

use std::fs;
use std::io::Write;
use std::path::Path;

use nevlab_core::audit::{ConstantsLedger, Finding};
use nevlab_core::LemmaVerdict;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::AuditConfig;
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Process exit status for a run that produced a report.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_FINDINGS: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// A verdict together with the height it was measured at, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportVerdict {
    pub t: Option<f64>,
    #[serde(flatten)]
    pub verdict: LemmaVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Findings,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => EXIT_PASS,
            Self::Fail => EXIT_FAILED,
            Self::Findings => EXIT_FINDINGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub verdicts: usize,
    pub passed: usize,
    pub failed: usize,
    pub findings: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTiming {
    pub t: f64,
    pub seconds: f64,
}

/// The only part of a report that varies between identical runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub per_t: Vec<PointTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub config: AuditConfig,
    pub ledger: Option<ConstantsLedger>,
    pub verdicts: Vec<ReportVerdict>,
    pub findings: Vec<Finding>,
    pub measurements: Option<Value>,
    pub summary: Summary,
    pub timing: Timing,
}

/// The pieces a command produces, before summary and timing are attached.
#[derive(Debug, Default)]
pub struct Outcome {
    pub ledger: Option<ConstantsLedger>,
    pub verdicts: Vec<ReportVerdict>,
    pub findings: Vec<Finding>,
    pub measurements: Option<Value>,
    pub per_t: Vec<PointTiming>,
}

impl Outcome {
    pub fn push(&mut self, t: Option<f64>, verdicts: impl IntoIterator<Item = LemmaVerdict>) {
        self.verdicts
            .extend(verdicts.into_iter().map(|verdict| ReportVerdict { t, verdict }));
    }
}

fn summarize(verdicts: &[ReportVerdict], findings: &[Finding]) -> Summary {
    let passed = verdicts.iter().filter(|v| v.verdict.pass).count();
    let failed = verdicts.len() - passed;
    let status = if !findings.is_empty() {
        Status::Findings
    } else if failed > 0 {
        Status::Fail
    } else {
        Status::Pass
    };
    Summary {
        verdicts: verdicts.len(),
        passed,
        failed,
        findings: findings.len(),
        status,
    }
}

impl ReportDocument {
    pub fn new(command: &str, config: AuditConfig, outcome: Outcome, wall_seconds: f64) -> Self {
        let summary = summarize(&outcome.verdicts, &outcome.findings);
        Self {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::default(),
            command: command.into(),
            config,
            ledger: outcome.ledger,
            verdicts: outcome.verdicts,
            findings: outcome.findings,
            measurements: outcome.measurements,
            summary,
            timing: Timing {
                wall_seconds,
                per_t: outcome.per_t,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// `to_json` without the timing block, for comparing runs.
    pub fn deterministic_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut value {
            map.remove("timing");
        }
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    /// One row per verdict: `t, lemma_id, computed, bound, margin, pass, error_estimate`.
    pub fn write_csv<W: Write>(&self, sink: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["t", "lemma_id", "computed", "bound", "margin", "pass", "error_estimate"])?;
        for row in &self.verdicts {
            let v = &row.verdict;
            w.write_record([
                row.t.map(|t| t.to_string()).unwrap_or_default(),
                v.lemma_id.clone(),
                v.computed.to_string(),
                v.bound_value().to_string(),
                v.margin.to_string(),
                v.pass.to_string(),
                v.error_estimate.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let file = fs::File::create(path).map_err(|e| csv_err(e.into()))?;
        self.write_csv(file).map_err(csv_err)
    }
}
