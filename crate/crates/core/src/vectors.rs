//! Observation/reference vector accumulation at DVL epochs. The observation
//! vector folds DVL velocity, the body-frame specific-force integral, and the
//! Coriolis correction into one quantity that equals a fixed rotation of the
//! reference gravity integral.

use crate::earth::{earth_rate_n, gravity_n, GeoParams};
use crate::math::{skew, Mat3, Vec3};
use alloc::vec::Vec;

/// Body-frame DVL velocity at one epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DvlSample {
    pub v_b_meas: Vec3,
    pub epoch: usize,
}

/// Policy for the stored first-epoch velocity that every observation vector
/// subtracts. A spike on the very first sample biases the whole sequence, so
/// a median over the first N epochs is available as a guard.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum V0Guard {
    #[default]
    FirstSample,
    MedianOfFirst(usize),
}

impl V0Guard {
    /// Guard with the default window when enabled blindly.
    pub const DEFAULT_WINDOW: usize = 5;
}

/// Running accumulators for one alignment: observation vector beta, reference
/// vector alpha, and the correction integral beta_prime.
#[derive(Clone, Debug)]
pub struct VectorPair {
    pub beta: Vec3,
    pub alpha: Vec3,
    pub beta_prime: Vec3,
    pub epoch: usize,
    v_b0: Vec3,
    v0_buf: Vec<Vec3>,
    guard: V0Guard,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn median3(buf: &[Vec3]) -> Vec3 {
    let mut xs: Vec<f64> = buf.iter().map(|v| v.x).collect();
    let mut ys: Vec<f64> = buf.iter().map(|v| v.y).collect();
    let mut zs: Vec<f64> = buf.iter().map(|v| v.z).collect();
    Vec3 { x: median(&mut xs), y: median(&mut ys), z: median(&mut zs) }
}

impl VectorPair {
    pub fn new(first_dvl: DvlSample, guard: V0Guard) -> VectorPair {
        let mut v0_buf = Vec::new();
        if matches!(guard, V0Guard::MedianOfFirst(n) if n > 1) {
            v0_buf.push(first_dvl.v_b_meas);
        }
        VectorPair {
            beta: Vec3::ZERO,
            alpha: Vec3::ZERO,
            beta_prime: Vec3::ZERO,
            epoch: 0,
            v_b0: first_dvl.v_b_meas,
            v0_buf,
            guard,
        }
    }

    pub fn v_b0(&self) -> Vec3 {
        self.v_b0
    }

    /// Advances beta_prime by one epoch. dv_n and dv_b are the strapdown
    /// Coriolis and specific-force increments over the elapsed interval;
    /// both DCMs are sampled at the interval start. The constant attitude is
    /// unknown while aligning, so the n-side term uses the caller's current
    /// estimate (identity before the first solve).
    pub fn update_beta_prime(
        &mut self,
        c_n0_b0_est: Mat3,
        c_b_b0_prev: Mat3,
        c_n_n0_prev: Mat3,
        dv_n: Vec3,
        dv_b: Vec3,
    ) {
        self.beta_prime += c_n0_b0_est * (c_n_n0_prev * dv_n) - c_b_b0_prev * dv_b;
    }

    /// Observation vector at the sample's epoch. Feeds the guard buffer while
    /// it is still filling, so the stored v_b0 settles after the window.
    pub fn compute_beta(&mut self, c_b_b0: Mat3, dvl: DvlSample) -> Vec3 {
        if let V0Guard::MedianOfFirst(n) = self.guard {
            if dvl.epoch > 0 && self.v0_buf.len() < n {
                self.v0_buf.push(dvl.v_b_meas);
            }
            if !self.v0_buf.is_empty() {
                self.v_b0 = median3(&self.v0_buf);
            }
        }
        self.beta = c_b_b0 * dvl.v_b_meas - self.v_b0 + self.beta_prime;
        self.epoch = dvl.epoch;
        self.beta
    }

    /// Advances alpha by one epoch of the rotating-frame gravity integral,
    /// with the first-order Earth-rotation correction inside the interval.
    pub fn update_alpha(&mut self, c_n_n0_prev: Mat3, geo: &GeoParams, dt_d: f64) {
        let w = skew(earth_rate_n(geo));
        let kernel = Mat3::IDENTITY * dt_d + w * (dt_d * dt_d / 2.0);
        self.alpha += c_n_n0_prev * (kernel * gravity_n(geo));
    }
}
