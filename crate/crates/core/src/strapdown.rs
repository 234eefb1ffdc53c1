//! Attitude integration at sensor rates: the two DCMs tracked from startup
//! (body-to-initial-body and nav-to-initial-nav) and the discrete velocity
//! increments needed by the observation-vector recursion.

use crate::earth::{earth_rate_n, GeoParams};
use crate::math::{dcm_from_rotvec, skew, Mat3, Vec3};

/// Bounds roundoff drift; projection cost is negligible at this cadence.
const REORTH_INTERVAL: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrapdownError {
    /// dt_d is not an integer multiple of dt_s.
    IntervalRatio { dt_s: f64, dt_d: f64 },
    /// update_body_dcm takes one sample or a full DVL interval of D samples.
    SampleCount { expected: usize, got: usize },
}

impl core::fmt::Display for StrapdownError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StrapdownError::IntervalRatio { dt_s, dt_d } => {
                write!(f, "dvl interval {dt_d} s is not an integer multiple of imu interval {dt_s} s")
            }
            StrapdownError::SampleCount { expected, got } => {
                write!(f, "expected 1 or {expected} gyro samples, got {got}")
            }
        }
    }
}

impl core::error::Error for StrapdownError {}

/// Integrated rotations since startup. Both matrices start at identity.
#[derive(Clone, Debug)]
pub struct RotationState {
    pub c_b_b0: Mat3,
    pub c_n_n0: Mat3,
    pub dt_s: f64,
    pub dt_d: f64,
    /// IMU samples per DVL interval.
    pub d: usize,
    body_steps: u64,
    nav_steps: u64,
}

impl RotationState {
    pub fn new(dt_s: f64, dt_d: f64) -> Result<Self, StrapdownError> {
        if !(dt_s > 0.0) || !(dt_d > 0.0) {
            return Err(StrapdownError::IntervalRatio { dt_s, dt_d });
        }
        let ratio = dt_d / dt_s;
        let d_int = crate::fp::round(ratio);
        if (ratio - d_int).abs() > 1e-9 || d_int < 1.0 {
            return Err(StrapdownError::IntervalRatio { dt_s, dt_d });
        }
        Ok(RotationState {
            c_b_b0: Mat3::IDENTITY,
            c_n_n0: Mat3::IDENTITY,
            dt_s,
            dt_d,
            d: d_int as usize,
            body_steps: 0,
            nav_steps: 0,
        })
    }

    /// Advances the body DCM by the angle accumulated over the given gyro
    /// samples (rad/s, each spanning one IMU interval). Pass a single sample
    /// for per-step chaining or all D samples of one DVL interval at once;
    /// the single-sample form preserves non-commutativity between steps.
    pub fn update_body_dcm(&mut self, gyro_samples: &[Vec3]) -> Result<(), StrapdownError> {
        if gyro_samples.len() != 1 && gyro_samples.len() != self.d {
            return Err(StrapdownError::SampleCount { expected: self.d, got: gyro_samples.len() });
        }
        let mut theta = Vec3::ZERO;
        for w in gyro_samples {
            theta += *w * self.dt_s;
        }
        self.c_b_b0 = self.c_b_b0 * dcm_from_rotvec(theta);
        self.body_steps += 1;
        if self.body_steps % REORTH_INTERVAL == 0 {
            self.c_b_b0 = self.c_b_b0.reorthonormalize();
        }
        Ok(())
    }

    /// Advances the nav DCM by one DVL interval of Earth rotation; the
    /// transport rate is neglected against omega_ie for short tracks.
    pub fn update_nav_dcm(&mut self, geo: &GeoParams) {
        self.c_n_n0 = self.c_n_n0 * dcm_from_rotvec(earth_rate_n(geo) * self.dt_d);
        self.nav_steps += 1;
        if self.nav_steps % REORTH_INTERVAL == 0 {
            self.c_n_n0 = self.c_n_n0.reorthonormalize();
        }
    }
}

/// Angular and velocity increments of the two halves of one sample pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImuIncrements {
    pub dtheta1: Vec3,
    pub dtheta2: Vec3,
    pub dv1: Vec3,
    pub dv2: Vec3,
}

/// Two-sample velocity increment: the plain sum plus the rotation and sculling
/// corrections for body motion during the pair.
pub fn two_sample_increment(inc: &ImuIncrements) -> Vec3 {
    let dth = inc.dtheta1 + inc.dtheta2;
    let dv = inc.dv1 + inc.dv2;
    dv + dth.cross(dv) * 0.5
        + (inc.dtheta1.cross(inc.dv2) + inc.dv1.cross(inc.dtheta2)) * (2.0 / 3.0)
}

/// Earth-rate Coriolis increment over one DVL interval, trapezoid in the
/// endpoint velocities with first-order frame-rotation weighting.
pub fn coriolis_increment(v_n_k: Vec3, v_n_k1: Vec3, geo: &GeoParams, dt_d: f64) -> Vec3 {
    let w = skew(earth_rate_n(geo));
    let half = Mat3::IDENTITY * (dt_d / 2.0);
    let w1 = half + w * (dt_d * dt_d / 6.0);
    let w2 = half + w * (dt_d * dt_d / 3.0);
    w1 * (w * v_n_k) + w2 * (w * v_n_k1)
}
