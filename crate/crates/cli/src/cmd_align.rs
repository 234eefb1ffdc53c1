//! `align`: run one comparison scheme over sensor logs and emit the run
//! report plus tidy plot-data CSVs.

use std::path::Path;

use dvl_align::earth::GeoParams;
use dvl_align::pipeline::run as run_pipeline;

use crate::config::RunConfig;
use crate::csvio::{self, Table};
use crate::errors::CliError;
use crate::report::{RunReport, Source};

pub struct AlignArgs<'a> {
    pub imu: &'a Path,
    pub dvl: &'a Path,
    pub truth: Option<&'a Path>,
    pub scheme: u8,
    pub config: Option<&'a Path>,
    pub out: &'a Path,
}

pub fn run(args: AlignArgs<'_>) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.config)?;
    let mut acfg = cfg.aligner_config(args.scheme)?;

    let imu_table = Table::read(args.imu)?;
    let dvl_table = Table::read(args.dvl)?;
    let imu = csvio::parse_imu(&imu_table)?;
    let dvl = csvio::parse_dvl(&dvl_table)?;
    let truth = match args.truth {
        Some(p) => Some(csvio::parse_truth(&Table::read(p)?)?),
        None => None,
    };

    // the log knows its own rates and site; config only fills the gaps
    if let Some(r) = imu_table.meta_f64("rate_hz") {
        acfg.dt_s = 1.0 / r;
    }
    if let Some(r) = dvl_table.meta_f64("rate_hz") {
        acfg.dt_d = 1.0 / r;
    }
    if let Some(lat) = imu_table.meta_f64("latitude_deg") {
        acfg.geo = GeoParams::from_latitude(lat * std::f64::consts::PI / 180.0);
    }

    if let Some(p) = dvl_table.meta_f64("outlier_prob") {
        let expects_outliers = matches!(args.scheme, 1 | 2);
        if expects_outliers && p == 0.0 {
            eprintln!(
                "warning: scheme {} is the outlier-exposed arm but the DVL log was generated with outlier_prob=0",
                args.scheme
            );
        }
        if !expects_outliers && p > 0.0 {
            eprintln!(
                "warning: scheme {} is the clean-data arm but the DVL log was generated with outlier_prob={p}",
                args.scheme
            );
        }
    }

    let dt_d = acfg.dt_d;
    let trace = run_pipeline(acfg, &imu, &dvl, truth.as_deref())
        .map_err(|e| CliError::Data(e.to_string()))?;

    std::fs::create_dir_all(args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;

    let source = Source {
        imu: args.imu.display().to_string(),
        dvl: args.dvl.display().to_string(),
        truth: args.truth.map(|p| p.display().to_string()),
    };
    let report = RunReport::from_trace(args.scheme, cfg, source, &trace, dt_d);
    report.save(&args.out.join("report.toml"))?;

    let mut obs = Table::new(
        vec![("format".to_string(), "observation_vectors".to_string())],
        &[
            "t_s", "beta_x", "beta_y", "beta_z", "beta_recon_x", "beta_recon_y",
            "beta_recon_z", "alpha_x", "alpha_y", "alpha_z",
        ],
    );
    obs.rows = trace
        .records
        .iter()
        .map(|r| {
            vec![
                r.t,
                r.beta_raw.x, r.beta_raw.y, r.beta_raw.z,
                r.beta_recon.x, r.beta_recon.y, r.beta_recon.z,
                r.alpha.x, r.alpha.y, r.alpha.z,
            ]
        })
        .collect();
    obs.write(&args.out.join("observation_vectors.csv"))?;

    let mut errs = Table::new(
        vec![("format".to_string(), "angle_errors".to_string())],
        &["t_s", "pitch_err_deg", "roll_err_deg", "yaw_err_deg", "weight_min"],
    );
    errs.rows = report.epochs.iter().map(|row| row.to_vec()).collect();
    errs.write(&args.out.join("angle_errors.csv"))?;

    for (i, &cp) in report.summary.checkpoints_s.iter().enumerate() {
        println!(
            "scheme {} at {cp} s: pitch {:+.5} deg, roll {:+.5} deg, yaw {:+.5} deg",
            args.scheme,
            report.summary.pitch_err_deg[i],
            report.summary.roll_err_deg[i],
            report.summary.yaw_err_deg[i],
        );
    }
    Ok(())
}
