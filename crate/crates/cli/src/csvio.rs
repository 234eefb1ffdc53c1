//! Headered CSV persistence. Files start with `# key=value` preamble lines,
//! then one column-name row, then numeric rows. Floats print in Rust's
//! shortest round-trip form, so write -> read -> write is byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use dvl_align::attitude::dcm_from_euler;
use dvl_align::math::{vec3, Mat3};
use dvl_align::sim::{DvlMeas, ImuSample, SpikeEvent, TruthSample};

use crate::errors::CliError;

pub const IMU_COLUMNS: [&str; 7] = ["t_s", "wx", "wy", "wz", "fx", "fy", "fz"];
pub const DVL_COLUMNS: [&str; 4] = ["t_s", "vx", "vy", "vz"];
pub const TRUTH_COLUMNS: [&str; 7] =
    ["t_s", "pitch_deg", "roll_deg", "yaw_deg", "vx_n", "vy_n", "vz_n"];
pub const SPIKE_COLUMNS: [&str; 5] = ["epoch", "t_s", "dx", "dy", "dz"];

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Preamble in file order; order is preserved so round-trips are exact.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(meta: Vec<(String, String)>, columns: &[&str]) -> Table {
        Table {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta_value(key)?.parse().ok()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render())
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Table, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Table::parse(&text).map_err(|e| match e {
            CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Table, CliError> {
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if let Some(rest) = line.strip_prefix('#') {
                if columns.is_some() {
                    return Err(CliError::Data(format!(
                        "line {lineno}: comment after header row"
                    )));
                }
                let rest = rest.trim_start();
                let (k, v) = rest.split_once('=').ok_or_else(|| {
                    CliError::Data(format!("line {lineno}: preamble is not key=value"))
                })?;
                meta.push((k.to_string(), v.to_string()));
                continue;
            }
            if line.is_empty() {
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(|c| c.to_string()).collect()),
                Some(cols) => {
                    let mut row = Vec::with_capacity(cols.len());
                    for cell in line.split(',') {
                        row.push(cell.parse::<f64>().map_err(|_| {
                            CliError::Data(format!("line {lineno}: bad number {cell:?}"))
                        })?);
                    }
                    if row.len() != cols.len() {
                        return Err(CliError::Data(format!(
                            "line {lineno}: {} cells, expected {}",
                            row.len(),
                            cols.len()
                        )));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns
            .ok_or_else(|| CliError::Data("missing column header row".to_string()))?;
        Ok(Table { meta, columns, rows })
    }

    fn expect_columns(&self, want: &[&str]) -> Result<(), CliError> {
        if self.columns != want {
            return Err(CliError::Data(format!(
                "columns {:?}, expected {want:?}",
                self.columns
            )));
        }
        Ok(())
    }

    /// Strictly increasing first column; when the preamble declares rate_hz,
    /// row spacing must match the declared period within 1e-9 s.
    fn check_timestamps(&self) -> Result<(), CliError> {
        let period = self.meta_f64("rate_hz").map(|r| 1.0 / r);
        for w in self.rows.windows(2) {
            let (a, b) = (w[0][0], w[1][0]);
            if b <= a {
                return Err(CliError::Data(format!(
                    "timestamps not strictly increasing at t={b}"
                )));
            }
            if let Some(p) = period {
                if (b - a - p).abs() > 1e-9 {
                    return Err(CliError::Data(format!(
                        "row spacing {} at t={b} does not match declared rate",
                        b - a
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn imu_table(samples: &[ImuSample], meta: Vec<(String, String)>) -> Table {
    let mut t = Table::new(meta, &IMU_COLUMNS);
    t.rows = samples
        .iter()
        .map(|s| vec![s.t, s.gyro.x, s.gyro.y, s.gyro.z, s.accel.x, s.accel.y, s.accel.z])
        .collect();
    t
}

pub fn parse_imu(table: &Table) -> Result<Vec<ImuSample>, CliError> {
    table.expect_columns(&IMU_COLUMNS)?;
    table.check_timestamps()?;
    Ok(table
        .rows
        .iter()
        .map(|r| ImuSample { t: r[0], gyro: vec3(r[1], r[2], r[3]), accel: vec3(r[4], r[5], r[6]) })
        .collect())
}

pub fn dvl_table(meas: &[DvlMeas], meta: Vec<(String, String)>) -> Table {
    let mut t = Table::new(meta, &DVL_COLUMNS);
    t.rows = meas.iter().map(|m| vec![m.t, m.v_b.x, m.v_b.y, m.v_b.z]).collect();
    t
}

pub fn parse_dvl(table: &Table) -> Result<Vec<DvlMeas>, CliError> {
    table.expect_columns(&DVL_COLUMNS)?;
    table.check_timestamps()?;
    Ok(table
        .rows
        .iter()
        .map(|r| DvlMeas { t: r[0], v_b: vec3(r[1], r[2], r[3]) })
        .collect())
}

pub fn truth_table(samples: &[TruthSample], meta: Vec<(String, String)>) -> Table {
    let mut t = Table::new(meta, &TRUTH_COLUMNS);
    t.rows = samples
        .iter()
        .map(|s| {
            let e = dvl_align::attitude::euler_from_dcm(s.c_bn);
            vec![
                s.t,
                e.pitch.to_degrees(),
                e.roll.to_degrees(),
                e.yaw.to_degrees(),
                s.v_n.x,
                s.v_n.y,
                s.v_n.z,
            ]
        })
        .collect();
    t
}

pub fn parse_truth(table: &Table) -> Result<Vec<(f64, Mat3)>, CliError> {
    table.expect_columns(&TRUTH_COLUMNS)?;
    table.check_timestamps()?;
    Ok(table
        .rows
        .iter()
        .map(|r| {
            (r[0], dcm_from_euler(r[1].to_radians(), r[2].to_radians(), r[3].to_radians()))
        })
        .collect())
}

pub fn spike_table(spikes: &[SpikeEvent], meta: Vec<(String, String)>) -> Table {
    let mut t = Table::new(meta, &SPIKE_COLUMNS);
    t.rows = spikes
        .iter()
        .map(|s| vec![s.epoch as f64, s.t, s.delta.x, s.delta.y, s.delta.z])
        .collect();
    t
}

pub fn parse_spikes(table: &Table) -> Result<Vec<SpikeEvent>, CliError> {
    table.expect_columns(&SPIKE_COLUMNS)?;
    Ok(table
        .rows
        .iter()
        .map(|r| SpikeEvent { epoch: r[0] as usize, t: r[1], delta: vec3(r[2], r[3], r[4]) })
        .collect())
}
