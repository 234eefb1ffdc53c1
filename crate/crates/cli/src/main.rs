//! In-motion SINS/DVL initial-alignment toolkit. Three subcommands cover the
//! full loop: simulate sensor logs, align with one of the four comparison
//! schemes, compare run reports against thresholds.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 acceptance failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dvl_align_cli::{cmd_align, cmd_compare, cmd_simulate};

#[derive(Parser)]
#[command(name = "dvl-align", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate simulated IMU, DVL, truth, and spike-sidecar logs
    Simulate {
        /// TOML run config; omit for the standard S-turn defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed; sensor streams derive theirs from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for the four CSV files
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one alignment scheme over sensor logs
    Align {
        /// IMU log (t_s, wx, wy, wz, fx, fy, fz)
        #[arg(long)]
        imu: PathBuf,
        /// DVL log (t_s, vx, vy, vz)
        #[arg(long)]
        dvl: PathBuf,
        /// Truth log; enables per-epoch error columns
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Comparison scheme 1-4 (1/3 raw, 2/4 reconstructed observation)
        #[arg(long)]
        scheme: u8,
        /// TOML run config; omit for defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report.toml and plot CSVs
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate run reports side by side; with --criteria, gate on thresholds
    Compare {
        /// Two or more report.toml files
        reports: Vec<PathBuf>,
        /// TOML criteria file; exit code 3 when a threshold fails
        #[arg(long)]
        criteria: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let result = match &cli.cmd {
        Cmd::Simulate { config, seed, out } => {
            cmd_simulate::run(config.as_deref(), *seed, out)
        }
        Cmd::Align { imu, dvl, truth, scheme, config, out } => {
            cmd_align::run(cmd_align::AlignArgs {
                imu,
                dvl,
                truth: truth.as_deref(),
                scheme: *scheme,
                config: config.as_deref(),
                out,
            })
        }
        Cmd::Compare { reports, criteria } => {
            cmd_compare::run(reports, criteria.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
