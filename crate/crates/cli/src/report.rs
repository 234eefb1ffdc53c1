//! Versioned run report: per-epoch alignment errors plus checkpoint summary,
//! persisted as TOML. Readers accept any minor revision of the current major
//! and reject everything else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::errors::CliError;
use dvl_align::pipeline::AlignmentTrace;

pub const SCHEMA: &str = "1.0";
pub const SCHEMA_MAJOR: u64 = 1;
pub const CHECKPOINTS_S: [f64; 3] = [100.0, 200.0, 300.0];
pub const EPOCH_COLUMNS: [&str; 5] =
    ["t_s", "pitch_err_deg", "roll_err_deg", "yaw_err_deg", "weight_min"];

/// Scalar and array fields stay ahead of the tables; TOML cannot emit a
/// value after a table at the same level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub scheme: u8,
    pub epoch_columns: Vec<String>,
    /// One row per DVL epoch, columns as in epoch_columns. Error entries are
    /// NaN when the run had no truth stream.
    pub epochs: Vec<[f64; 5]>,
    pub source: Source,
    pub config: RunConfig,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Source {
    pub imu: String,
    pub dvl: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    /// Standard checkpoints that fall inside the run.
    pub checkpoints_s: Vec<f64>,
    pub pitch_err_deg: Vec<f64>,
    pub roll_err_deg: Vec<f64>,
    pub yaw_err_deg: Vec<f64>,
}

impl RunReport {
    pub fn from_trace(
        scheme: u8,
        config: RunConfig,
        source: Source,
        trace: &AlignmentTrace,
        dt_d: f64,
    ) -> RunReport {
        let epochs: Vec<[f64; 5]> = trace
            .records
            .iter()
            .map(|r| {
                let e = r.euler_err_deg.unwrap_or([f64::NAN; 3]);
                let wmin = r.weights.iter().copied().fold(f64::INFINITY, f64::min);
                [r.t, e[0], e[1], e[2], wmin]
            })
            .collect();
        let last_t = trace.records.last().map(|r| r.t).unwrap_or(0.0);
        let mut summary = Summary::default();
        for &cp in &CHECKPOINTS_S {
            if cp > last_t {
                continue;
            }
            if let Some(r) = trace.at(cp, dt_d) {
                let e = r.euler_err_deg.unwrap_or([f64::NAN; 3]);
                summary.checkpoints_s.push(cp);
                summary.pitch_err_deg.push(e[0]);
                summary.roll_err_deg.push(e[1]);
                summary.yaw_err_deg.push(e[2]);
            }
        }
        RunReport {
            schema: SCHEMA.to_string(),
            scheme,
            epoch_columns: EPOCH_COLUMNS.iter().map(|c| c.to_string()).collect(),
            epochs,
            source,
            config,
            summary,
        }
    }

    /// Signed errors at one checkpoint as (pitch, roll, yaw), if present.
    pub fn at_checkpoint(&self, cp: f64) -> Option<[f64; 3]> {
        let i = self.summary.checkpoints_s.iter().position(|&c| c == cp)?;
        Some([
            self.summary.pitch_err_deg[i],
            self.summary.roll_err_deg[i],
            self.summary.yaw_err_deg[i],
        ])
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = toml::to_string(self)?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<RunReport, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let value: toml::Value = text
            .parse()
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let schema = value
            .get("schema")
            .and_then(|v| v.as_str())
            .ok_or_else(|| {
                CliError::Data(format!("{}: missing schema field", path.display()))
            })?;
        let major: u64 = schema
            .split('.')
            .next()
            .and_then(|m| m.parse().ok())
            .ok_or_else(|| {
                CliError::Data(format!("{}: malformed schema {schema:?}", path.display()))
            })?;
        if major != SCHEMA_MAJOR {
            return Err(CliError::Data(format!(
                "{}: unsupported report schema {schema} (reader supports major {SCHEMA_MAJOR})",
                path.display()
            )));
        }
        value
            .try_into()
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}
