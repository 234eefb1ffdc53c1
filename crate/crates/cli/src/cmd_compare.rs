//! `compare`: tabulate checkpoint errors of several run reports side by side
//! and, given a criteria file, gate on the thresholds.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::errors::CliError;
use crate::report::RunReport;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Criteria {
    pub checkpoint_s: f64,
    pub max_pitch_err_deg: f64,
    pub max_roll_err_deg: f64,
    pub max_yaw_err_deg: f64,
    /// Schemes the magnitude thresholds apply to.
    pub thresholded_schemes: Vec<u8>,
    /// Optional (worse, better) pair: the first scheme's |yaw| must exceed
    /// the second's at the checkpoint.
    #[serde(default)]
    pub require_yaw_worse_pair: Option<[u8; 2]>,
}

pub fn run(reports: &[PathBuf], criteria: Option<&Path>) -> Result<(), CliError> {
    if reports.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least two reports, got {}",
            reports.len()
        )));
    }
    let loaded: Vec<RunReport> =
        reports.iter().map(|p| RunReport::load(p)).collect::<Result<_, _>>()?;

    let checkpoints = &loaded[0].summary.checkpoints_s;
    for (path, rep) in reports.iter().zip(&loaded).skip(1) {
        if &rep.summary.checkpoints_s != checkpoints {
            return Err(CliError::Data(format!(
                "{}: checkpoints {:?} do not match {:?} from {}",
                path.display(),
                rep.summary.checkpoints_s,
                checkpoints,
                reports[0].display()
            )));
        }
    }

    print!("{:>10}  {:<14}", "checkpoint", "angle");
    for rep in &loaded {
        print!("{:>14}", format!("scheme {}", rep.scheme));
    }
    println!();
    for &cp in checkpoints {
        for (angle, pick) in [
            ("pitch err deg", 0usize),
            ("roll err deg", 1),
            ("yaw err deg", 2),
        ] {
            print!("{:>8} s  {:<14}", cp, angle);
            for rep in &loaded {
                let e = rep.at_checkpoint(cp).expect("checkpoint equality already checked");
                print!("{:>14.6}", e[pick]);
            }
            println!();
        }
    }

    let Some(criteria_path) = criteria else {
        return Ok(());
    };
    let text = std::fs::read_to_string(criteria_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", criteria_path.display())))?;
    let crit: Criteria = toml::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", criteria_path.display())))?;

    if !checkpoints.contains(&crit.checkpoint_s) {
        return Err(CliError::Data(format!(
            "criteria checkpoint {} s is not among report checkpoints {:?}",
            crit.checkpoint_s, checkpoints
        )));
    }

    let at = |scheme: u8| -> Option<[f64; 3]> {
        loaded
            .iter()
            .find(|r| r.scheme == scheme)
            .and_then(|r| r.at_checkpoint(crit.checkpoint_s))
    };

    let mut failures = Vec::new();
    for &scheme in &crit.thresholded_schemes {
        let Some(e) = at(scheme) else {
            return Err(CliError::Data(format!(
                "criteria reference scheme {scheme} but no such report was given"
            )));
        };
        // NaN errors (no truth stream) must fail, so test the negation
        let checks = [
            ("pitch", e[0], crit.max_pitch_err_deg),
            ("roll", e[1], crit.max_roll_err_deg),
            ("yaw", e[2], crit.max_yaw_err_deg),
        ];
        for (name, val, max) in checks {
            if !(val.abs() < max) {
                failures.push(format!(
                    "scheme {scheme} {name} error {val:+.6} deg at {} s is not under {max} deg",
                    crit.checkpoint_s
                ));
            }
        }
    }
    if let Some([worse, better]) = crit.require_yaw_worse_pair {
        match (at(worse), at(better)) {
            (Some(w), Some(b)) => {
                if !(w[2].abs() > b[2].abs()) {
                    failures.push(format!(
                        "scheme {worse} yaw error {:+.6} deg does not exceed scheme {better}'s {:+.6} deg",
                        w[2], b[2]
                    ));
                }
            }
            _ => {
                return Err(CliError::Data(format!(
                    "criteria reference schemes {worse} and {better} but matching reports are missing"
                )));
            }
        }
    }

    if failures.is_empty() {
        println!("all criteria hold at {} s", crit.checkpoint_s);
        Ok(())
    } else {
        Err(CliError::Acceptance(failures.join("\n")))
    }
}
