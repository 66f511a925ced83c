//! JSON reports. Every report carries enough data to be replayed without
//! the solver that produced it.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sonclyap_core::certificates::{NegativePoint, WitnessCheck};
use sonclyap_core::geometry::CircuitStructure;
use sonclyap_core::lyapunov::{Certificate, SampleSummary, Template};
use sonclyap_core::{CertificateKind, Exponent, LyapunovResult, Mode, Objective, SparsePoly, Verdict};

use crate::input::SystemFile;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    NotCertified,
    Unknown,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Certified => 0,
            Status::NotCertified => 1,
            Status::Unknown => 2,
        }
    }

    pub fn of_verdict(v: Verdict) -> Status {
        match v {
            Verdict::AsymptoticallyStable | Verdict::Stable => Status::Certified,
            Verdict::NotCertified => Status::NotCertified,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::NotCertified => "not certified",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub input_sha256: String,
    pub status: Status,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<LyapunovReport>,
}

impl Report {
    pub fn new(command: &str, input: &[u8], status: Status, wall_time_ms: f64) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input_sha256: sha256_hex(input),
            status,
            wall_time_ms,
            check: None,
            lyapunov: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Write(format!("{}: {e}", dir.display())))?;
        }
        let text = serde_json::to_string_pretty(self).expect("reports serialize");
        std::fs::write(path, text + "\n").map_err(|e| CliError::Write(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Report, CliError> {
        let raw = crate::input::read_file(path)?;
        let report: Report = serde_json::from_slice(&raw)
            .map_err(|e| CliError::Usage(format!("{}: malformed report: {e}", path.display())))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "{}: unsupported schema version {}",
                path.display(),
                report.schema_version
            )));
        }
        Ok(report)
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Result of `check` and `circuit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub poly: SparsePoly,
    pub display: String,
    pub certificate_kind: CertificateKind,
    pub solver_status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_check: Option<WitnessCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<NegativePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub structure: CircuitStructure,
    /// `None` without an inner term or with a nonpositive outer coefficient.
    pub theta: Option<f64>,
    pub inner_coefficient: Option<f64>,
    pub nonnegative: bool,
}

/// How a searched support was generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportRecord {
    pub degree: Option<u32>,
    pub template: Option<Template>,
    pub extras: Vec<Exponent>,
    pub exponents: Vec<Exponent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptionsRecord {
    pub certificate_kind: CertificateKind,
    pub mode: Mode,
    pub objective: Objective,
    pub interior_negative: bool,
    pub epsilon_min: f64,
    pub tol: f64,
}

/// Result of `verify` and `search`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub system: SystemFile,
    pub options: OptionsRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportRecord>,
    pub verdict: Verdict,
    pub solver_status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<LyapunovResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleSummary>,
}

/// Which residual groups of a check are within tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub ok: bool,
    pub split: bool,
    pub entropy: bool,
    pub balance: bool,
}

pub fn classify(c: &WitnessCheck) -> Classification {
    Classification {
        ok: c.ok,
        split: c.split <= c.tol,
        entropy: c.entropy <= c.tol,
        balance: c.balance <= c.tol,
    }
}
