//! `simulate`: generate IMU, DVL, truth, and spike-sidecar logs from a
//! trajectory config and a master seed.

use std::path::Path;

use dvl_align::sim::{gen_truth, synthesize_dvl, synthesize_imu, TruthModel};

use crate::config::RunConfig;
use crate::csvio;
use crate::errors::CliError;

/// Keeps the two sensor streams on unrelated ChaCha streams while still
/// driven by one master seed.
pub const DVL_SEED_SALT: u64 = 0x44564c5f53504b;

pub fn run(config: Option<&Path>, seed: u64, out: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let profile = cfg.profile();
    profile.validate().map_err(|e| CliError::Data(e.to_string()))?;
    let dvl_err = cfg.dvl_model(seed ^ DVL_SEED_SALT);
    dvl_err.validate().map_err(|e| CliError::Data(e.to_string()))?;
    let model = TruthModel::new(profile).map_err(|e| CliError::Data(e.to_string()))?;

    let duration = cfg.trajectory.duration_s;
    let dt_s = 1.0 / cfg.rates.imu_hz;
    let dt_d = 1.0 / cfg.rates.dvl_hz;

    let mut imu = synthesize_imu(&model, &cfg.imu_model(seed), dt_s);
    imu.retain(|s| s.t < duration - 1e-9);
    let (mut dvl, mut spikes) = synthesize_dvl(&model, &dvl_err, dt_d);
    dvl.retain(|m| m.t < duration - 1e-9);
    spikes.retain(|s| s.t < duration - 1e-9);
    let mut truth = gen_truth(&model, dt_s);
    truth.retain(|s| s.t <= duration + 1e-9);

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Data(format!("{}: {e}", out.display())))?;

    let fmt = |v: f64| format!("{v}");
    let site = vec![
        ("latitude_deg".to_string(), fmt(cfg.trajectory.latitude_deg)),
        ("longitude_deg".to_string(), fmt(cfg.trajectory.longitude_deg)),
    ];

    let mut imu_meta = vec![
        ("format".to_string(), "imu".to_string()),
        ("units".to_string(), "t_s s, w rad/s, f m/s^2".to_string()),
        ("rate_hz".to_string(), fmt(cfg.rates.imu_hz)),
        ("start_t_s".to_string(), "0".to_string()),
        ("seed".to_string(), seed.to_string()),
        ("gyro_bias_deg_h".to_string(), fmt(cfg.imu_errors.gyro_bias_deg_h)),
        ("gyro_arw_deg_sqrt_h".to_string(), fmt(cfg.imu_errors.gyro_arw_deg_sqrt_h)),
        ("accel_bias_ug".to_string(), fmt(cfg.imu_errors.accel_bias_ug)),
        ("accel_noise_ug_sqrt_hz".to_string(), fmt(cfg.imu_errors.accel_noise_ug_sqrt_hz)),
    ];
    imu_meta.extend(site.clone());
    csvio::imu_table(&imu, imu_meta).write(&out.join("imu.csv"))?;

    let mut dvl_meta = vec![
        ("format".to_string(), "dvl".to_string()),
        ("units".to_string(), "t_s s, v m/s".to_string()),
        ("rate_hz".to_string(), fmt(cfg.rates.dvl_hz)),
        ("start_t_s".to_string(), "0".to_string()),
        ("seed".to_string(), (seed ^ DVL_SEED_SALT).to_string()),
        ("sigma_mps".to_string(), fmt(cfg.dvl_errors.sigma_mps)),
        ("outlier_sigma_mps".to_string(), fmt(cfg.dvl_errors.outlier_sigma_mps)),
        ("outlier_prob".to_string(), fmt(cfg.dvl_errors.outlier_prob)),
    ];
    dvl_meta.extend(site.clone());
    csvio::dvl_table(&dvl, dvl_meta).write(&out.join("dvl.csv"))?;

    let mut truth_meta = vec![
        ("format".to_string(), "truth".to_string()),
        ("units".to_string(), "t_s s, angles deg, v m/s".to_string()),
        ("rate_hz".to_string(), fmt(cfg.rates.imu_hz)),
        ("start_t_s".to_string(), "0".to_string()),
    ];
    truth_meta.extend(site);
    csvio::truth_table(&truth, truth_meta).write(&out.join("truth.csv"))?;

    let spike_meta = vec![
        ("format".to_string(), "spikes".to_string()),
        ("units".to_string(), "t_s s, delta m/s".to_string()),
        ("count".to_string(), spikes.len().to_string()),
    ];
    csvio::spike_table(&spikes, spike_meta).write(&out.join("spikes.csv"))?;

    println!(
        "wrote {} ({} IMU rows, {} DVL rows, {} spikes, {:.0} s)",
        out.display(),
        imu.len(),
        dvl.len(),
        spikes.len(),
        duration
    );
    Ok(())
}
