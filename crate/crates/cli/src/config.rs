//! TOML run configuration shared by simulate and align. Config angles are
//! degrees and rates Hz for readability; conversion to the library's
//! radians/seconds happens here and nowhere else.

use std::path::Path;

use dvl_align::earth::{somigliana, GeoParams};
use dvl_align::pipeline::{AlignerConfig, Scheme};
use dvl_align::robust::RkfParams;
use dvl_align::sim::{
    DvlErrorModel, ImuErrorModel, Oscillation, Segment, TrajectoryProfile,
};
use dvl_align::vectors::V0Guard;
use serde::{Deserialize, Serialize};

use crate::errors::CliError;

/// Same expression the library uses, so defaults stay bit-identical to the
/// presets they mirror.
fn deg(x: f64) -> f64 {
    x * std::f64::consts::PI / 180.0
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub trajectory: TrajectoryCfg,
    pub rates: RatesCfg,
    pub imu_errors: ImuErrorCfg,
    pub dvl_errors: DvlErrorCfg,
    pub alignment: AlignmentCfg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryCfg {
    pub duration_s: f64,
    /// S-turn half-period; yaw rate alternates sign each segment.
    pub segment_s: f64,
    pub yaw_rate_dps: f64,
    pub ramp_s: f64,
    pub speed_mps: f64,
    pub initial_yaw_deg: f64,
    pub pitch_amplitude_deg: f64,
    pub pitch_period_s: f64,
    pub roll_amplitude_deg: f64,
    pub roll_period_s: f64,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

impl Default for TrajectoryCfg {
    fn default() -> Self {
        TrajectoryCfg {
            duration_s: 600.0,
            segment_s: 50.0,
            yaw_rate_dps: 3.0,
            ramp_s: 2.0,
            speed_mps: 5.0,
            initial_yaw_deg: 30.0,
            pitch_amplitude_deg: 2.0,
            pitch_period_s: 8.0,
            roll_amplitude_deg: 2.0,
            roll_period_s: 10.0,
            latitude_deg: 32.057313,
            longitude_deg: 118.786365,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesCfg {
    pub imu_hz: f64,
    pub dvl_hz: f64,
}

impl Default for RatesCfg {
    fn default() -> Self {
        RatesCfg { imu_hz: 200.0, dvl_hz: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImuErrorCfg {
    pub gyro_bias_deg_h: f64,
    pub gyro_arw_deg_sqrt_h: f64,
    pub accel_bias_ug: f64,
    pub accel_noise_ug_sqrt_hz: f64,
}

impl Default for ImuErrorCfg {
    fn default() -> Self {
        ImuErrorCfg {
            gyro_bias_deg_h: 0.02,
            gyro_arw_deg_sqrt_h: 0.005,
            accel_bias_ug: 50.0,
            accel_noise_ug_sqrt_hz: 50.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DvlErrorCfg {
    pub sigma_mps: f64,
    pub outlier_sigma_mps: f64,
    pub outlier_prob: f64,
}

impl Default for DvlErrorCfg {
    fn default() -> Self {
        DvlErrorCfg { sigma_mps: 0.1, outlier_sigma_mps: 30.0, outlier_prob: 0.02 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignmentCfg {
    pub huber_gamma: f64,
    pub measurement_noise_r: f64,
    pub process_noise_q: f64,
    pub initial_covariance_p0: f64,
    pub max_reweight_iters: usize,
    /// First-epoch velocity guard: median over this many first epochs;
    /// 0 or 1 uses the first sample as-is (the default; a spike there biases
    /// the whole observation sequence, so a window of ~5 is the usual remedy).
    pub v0_guard_epochs: usize,
}

impl Default for AlignmentCfg {
    fn default() -> Self {
        AlignmentCfg {
            huber_gamma: 1.345,
            measurement_noise_r: 0.01,
            process_noise_q: 1e-6,
            initial_covariance_p0: 1e10,
            max_reweight_iters: 1,
            v0_guard_epochs: 1,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn profile(&self) -> TrajectoryProfile {
        let t = &self.trajectory;
        let n = (t.duration_s / t.segment_s).ceil().max(1.0) as usize;
        let rate = deg(t.yaw_rate_dps);
        TrajectoryProfile {
            segments: (0..n)
                .map(|i| Segment {
                    duration: t.segment_s,
                    yaw_rate: if i % 2 == 0 { rate } else { -rate },
                })
                .collect(),
            speed: t.speed_mps,
            initial_yaw: deg(t.initial_yaw_deg),
            pitch_osc: Oscillation {
                amplitude: deg(t.pitch_amplitude_deg),
                period: t.pitch_period_s,
            },
            roll_osc: Oscillation {
                amplitude: deg(t.roll_amplitude_deg),
                period: t.roll_period_s,
            },
            ramp: t.ramp_s,
            latitude: deg(t.latitude_deg),
            longitude: deg(t.longitude_deg),
        }
    }

    pub fn geo(&self) -> GeoParams {
        GeoParams::from_latitude(deg(self.trajectory.latitude_deg))
    }

    pub fn imu_model(&self, seed: u64) -> ImuErrorModel {
        let g = somigliana(deg(self.trajectory.latitude_deg));
        let e = &self.imu_errors;
        ImuErrorModel {
            gyro_bias: deg(e.gyro_bias_deg_h) / 3600.0,
            gyro_arw: deg(e.gyro_arw_deg_sqrt_h) / 60.0,
            accel_bias: e.accel_bias_ug * 1e-6 * g,
            accel_noise_density: e.accel_noise_ug_sqrt_hz * 1e-6 * g,
            seed,
        }
    }

    pub fn dvl_model(&self, seed: u64) -> DvlErrorModel {
        let e = &self.dvl_errors;
        DvlErrorModel {
            sigma: e.sigma_mps,
            outlier_sigma: e.outlier_sigma_mps,
            outlier_prob: e.outlier_prob,
            seed,
        }
    }

    pub fn aligner_config(&self, scheme_no: u8) -> Result<AlignerConfig, CliError> {
        let scheme = scheme_from_number(scheme_no)?;
        let a = &self.alignment;
        let mut cfg = AlignerConfig::new(
            self.geo(),
            1.0 / self.rates.imu_hz,
            1.0 / self.rates.dvl_hz,
            scheme,
        );
        cfg.rkf = RkfParams {
            gamma: a.huber_gamma,
            r: a.measurement_noise_r,
            q_diag: [a.process_noise_q; 4],
            p0_diag: [a.initial_covariance_p0; 4],
            max_reweight_iters: a.max_reweight_iters,
        };
        cfg.guard = if a.v0_guard_epochs > 1 {
            V0Guard::MedianOfFirst(a.v0_guard_epochs)
        } else {
            V0Guard::FirstSample
        };
        Ok(cfg)
    }
}

/// Comparison schemes 1 and 3 accumulate the raw observation vector; 2 and 4
/// the reconstructed one. Within each pair only the input data differ
/// (outlier-corrupted vs clean logs).
pub fn scheme_from_number(n: u8) -> Result<Scheme, CliError> {
    match n {
        1 | 3 => Ok(Scheme::Raw),
        2 | 4 => Ok(Scheme::Reconstructed),
        _ => Err(CliError::Usage(format!("scheme must be 1..=4, got {n}"))),
    }
}
