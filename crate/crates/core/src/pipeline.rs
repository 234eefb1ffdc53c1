//! End-to-end alignment state machine: consumes interleaved IMU and DVL
//! streams, maintains the inertial-frozen rotation chain, accumulates the
//! observation/reference vector pair, filters each observation channel, and
//! solves for the constant startup attitude every DVL epoch.

use crate::apparent::{gamma, BasisVec};
use crate::attitude::{euler_from_dcm, KMatrix};
use crate::earth::{GeoParams, OMEGA_IE};
use crate::math::{dcm_from_rotvec, Mat3, Quat, Vec3};
use crate::robust::{ChannelFilter, RkfParamError, RkfParams};
use crate::sim::{DvlMeas, ImuSample};
use crate::strapdown::{
    coriolis_increment, two_sample_increment, ImuIncrements, RotationState, StrapdownError,
};
use crate::vectors::{DvlSample, V0Guard, VectorPair};
use alloc::vec::Vec;

/// How the attitude accumulator is fed: the raw observation vector, or the
/// one reconstructed from the filtered coefficient estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Raw,
    Reconstructed,
}

#[derive(Clone, Debug)]
pub struct AlignerConfig {
    pub geo: GeoParams,
    pub dt_s: f64,
    pub dt_d: f64,
    pub scheme: Scheme,
    pub rkf: RkfParams,
    pub guard: V0Guard,
}

impl AlignerConfig {
    pub fn new(geo: GeoParams, dt_s: f64, dt_d: f64, scheme: Scheme) -> AlignerConfig {
        AlignerConfig { geo, dt_s, dt_d, scheme, rkf: RkfParams::default(), guard: V0Guard::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlignError {
    /// dt_d/dt_s must be an even integer so two-sample pairs tile each epoch.
    OddSampleRatio { d: usize },
    Rkf(RkfParamError),
    Strapdown(StrapdownError),
    ImuTimestamp { expected: f64, got: f64 },
    DvlTimestamp { expected: f64, got: f64 },
    /// DVL epoch arrived before its interval's IMU samples were consumed.
    RotationBehind { epoch: usize, have: usize, need: usize },
    EmptyStream,
}

impl core::fmt::Display for AlignError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AlignError::OddSampleRatio { d } => {
                write!(f, "samples per epoch must be even, got {d}")
            }
            AlignError::Rkf(e) => write!(f, "filter config: {e}"),
            AlignError::Strapdown(e) => write!(f, "strapdown: {e}"),
            AlignError::ImuTimestamp { expected, got } => {
                write!(f, "imu sample at t={got}, expected t={expected}")
            }
            AlignError::DvlTimestamp { expected, got } => {
                write!(f, "dvl sample at t={got}, expected t={expected}")
            }
            AlignError::RotationBehind { epoch, have, need } => {
                write!(f, "epoch {epoch} needs {need} imu samples, saw {have}")
            }
            AlignError::EmptyStream => f.write_str("empty sensor stream"),
        }
    }
}

impl core::error::Error for AlignError {}

impl From<RkfParamError> for AlignError {
    fn from(e: RkfParamError) -> AlignError {
        AlignError::Rkf(e)
    }
}

impl From<StrapdownError> for AlignError {
    fn from(e: StrapdownError) -> AlignError {
        AlignError::Strapdown(e)
    }
}

/// One row per DVL epoch. Angles and weights describe the state after this
/// epoch's accumulate/solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub t: f64,
    pub beta_raw: Vec3,
    pub beta_recon: Vec3,
    pub alpha: Vec3,
    /// Huber weight per observation channel.
    pub weights: [f64; 3],
    /// Startup-attitude estimate, identity until the first accepted solve.
    pub q: Quat,
    pub underdetermined: bool,
    /// Estimated C_b^n at this epoch.
    pub att_est: Mat3,
    /// (pitch, roll, yaw) estimate minus truth, degrees, when truth is known.
    pub euler_err_deg: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct AlignmentTrace {
    pub records: Vec<EpochRecord>,
}

impl AlignmentTrace {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    /// Record nearest to time t, within half an epoch.
    pub fn at(&self, t: f64, dt_d: f64) -> Option<&EpochRecord> {
        self.records.iter().find(|r| (r.t - t).abs() <= dt_d / 2.0)
    }
}

#[derive(Clone, Debug)]
pub struct Aligner {
    cfg: AlignerConfig,
    rot: RotationState,
    channels: [ChannelFilter; 3],
    k: KMatrix,
    /// Current estimate of the constant startup alignment.
    c_n0_b0: Mat3,
    q: Quat,
    solved: bool,
    pair: Option<VectorPair>,
    /// Interval accumulators, reset at each DVL epoch.
    c_acc: Mat3,
    dv_acc: Vec3,
    pending: Option<ImuSample>,
    imu_seen: usize,
    next_epoch: usize,
    /// Snapshots from the previous epoch for the beta_prime recursion.
    c_b_b0_prev: Mat3,
    prev_att: Mat3,
    prev_v: Vec3,
}

impl Aligner {
    pub fn new(cfg: AlignerConfig) -> Result<Aligner, AlignError> {
        let rot = RotationState::new(cfg.dt_s, cfg.dt_d)?;
        if rot.d % 2 != 0 {
            return Err(AlignError::OddSampleRatio { d: rot.d });
        }
        let channels = [
            ChannelFilter::new(&cfg.rkf)?,
            ChannelFilter::new(&cfg.rkf)?,
            ChannelFilter::new(&cfg.rkf)?,
        ];
        Ok(Aligner {
            cfg,
            rot,
            channels,
            k: KMatrix::new(),
            c_n0_b0: Mat3::IDENTITY,
            q: Quat::IDENTITY,
            solved: false,
            pair: None,
            c_acc: Mat3::IDENTITY,
            dv_acc: Vec3::ZERO,
            pending: None,
            imu_seen: 0,
            next_epoch: 0,
            c_b_b0_prev: Mat3::IDENTITY,
            prev_att: Mat3::IDENTITY,
            prev_v: Vec3::ZERO,
        })
    }

    pub fn config(&self) -> &AlignerConfig {
        &self.cfg
    }

    /// Latest startup-attitude estimate (identity before the first solve).
    pub fn alignment_estimate(&self) -> Mat3 {
        self.c_n0_b0
    }

    pub fn has_solution(&self) -> bool {
        self.solved
    }

    /// Estimated C_b^n from the current rotation chain and alignment.
    pub fn current_attitude(&self) -> Mat3 {
        (self.rot.c_n_n0.transpose() * self.c_n0_b0.transpose()) * self.rot.c_b_b0
    }

    pub fn process_imu(&mut self, sample: ImuSample) -> Result<(), AlignError> {
        let expected = self.imu_seen as f64 * self.cfg.dt_s;
        if (sample.t - expected).abs() > 1e-9 {
            return Err(AlignError::ImuTimestamp { expected, got: sample.t });
        }
        match self.pending.take() {
            None => self.pending = Some(sample),
            Some(first) => {
                let inc = ImuIncrements {
                    dtheta1: first.gyro * self.cfg.dt_s,
                    dtheta2: sample.gyro * self.cfg.dt_s,
                    dv1: first.accel * self.cfg.dt_s,
                    dv2: sample.accel * self.cfg.dt_s,
                };
                // sculling increment in the pair-start frame, rotated into the
                // epoch-start frame before the attitude advances past the pair
                self.dv_acc += self.c_acc * two_sample_increment(&inc);
                self.c_acc = self.c_acc
                    * dcm_from_rotvec(inc.dtheta1)
                    * dcm_from_rotvec(inc.dtheta2);
                self.rot.update_body_dcm(&[first.gyro])?;
                self.rot.update_body_dcm(&[sample.gyro])?;
            }
        }
        self.imu_seen += 1;
        Ok(())
    }

    pub fn process_dvl(&mut self, meas: DvlMeas) -> Result<EpochRecord, AlignError> {
        let m = self.next_epoch;
        let expected = m as f64 * self.cfg.dt_d;
        if (meas.t - expected).abs() > 1e-9 {
            return Err(AlignError::DvlTimestamp { expected, got: meas.t });
        }
        let need = m * self.rot.d;
        if self.imu_seen != need {
            return Err(AlignError::RotationBehind { epoch: m, have: self.imu_seen, need });
        }
        let record = if m == 0 {
            self.pair = Some(VectorPair::new(
                DvlSample { v_b_meas: meas.v_b, epoch: 0 },
                self.cfg.guard,
            ));
            self.prev_att = Mat3::IDENTITY;
            self.prev_v = meas.v_b;
            self.c_b_b0_prev = self.rot.c_b_b0;
            EpochRecord {
                t: meas.t,
                beta_raw: Vec3::ZERO,
                beta_recon: Vec3::ZERO,
                alpha: Vec3::ZERO,
                weights: [1.0; 3],
                q: self.q,
                underdetermined: true,
                att_est: self.current_attitude(),
                euler_err_deg: None,
            }
        } else {
            self.close_epoch(m, meas)?
        };
        self.next_epoch += 1;
        Ok(record)
    }

    fn close_epoch(&mut self, m: usize, meas: DvlMeas) -> Result<EpochRecord, AlignError> {
        let pair = self.pair.as_mut().expect("epoch 0 initializes the pair");
        let geo = self.cfg.geo;
        let dt_d = self.cfg.dt_d;

        let c_n_n0_old = self.rot.c_n_n0;
        self.rot.update_nav_dcm(&geo);
        let att_now =
            (self.rot.c_n_n0.transpose() * self.c_n0_b0.transpose()) * self.rot.c_b_b0;

        // velocity increment of the nav-frame terms over the closed interval
        let v_n_k = self.prev_att * self.prev_v;
        let v_n_k1 = att_now * meas.v_b;
        let dv_n = coriolis_increment(v_n_k, v_n_k1, &geo, dt_d);
        pair.update_beta_prime(self.c_n0_b0, self.c_b_b0_prev, c_n_n0_old, dv_n, self.dv_acc);
        let beta_raw =
            pair.compute_beta(self.rot.c_b_b0, DvlSample { v_b_meas: meas.v_b, epoch: m });
        pair.update_alpha(c_n_n0_old, &geo, dt_d);
        let alpha = pair.alpha;

        let basis = gamma(m as f64 * dt_d, OMEGA_IE);
        let (weights, beta_recon) = self.filter_channels(beta_raw, basis);
        let beta_for_k = match self.cfg.scheme {
            Scheme::Raw => beta_raw,
            Scheme::Reconstructed => beta_recon,
        };
        self.k.accumulate(beta_for_k, alpha);
        let underdetermined = match self.k.solve() {
            Ok(sol) => {
                self.c_n0_b0 = sol.c_n0_b0;
                self.q = sol.q;
                self.solved = true;
                false
            }
            Err(_) => true,
        };

        self.c_b_b0_prev = self.rot.c_b_b0;
        self.prev_att = self.current_attitude();
        self.prev_v = meas.v_b;
        self.c_acc = Mat3::IDENTITY;
        self.dv_acc = Vec3::ZERO;

        Ok(EpochRecord {
            t: meas.t,
            beta_raw,
            beta_recon,
            alpha,
            weights,
            q: self.q,
            underdetermined,
            att_est: self.prev_att,
            euler_err_deg: None,
        })
    }

    fn filter_channels(&mut self, beta_raw: Vec3, basis: BasisVec) -> ([f64; 3], Vec3) {
        let raw = beta_raw.to_array();
        let mut weights = [1.0; 3];
        let mut recon = [0.0; 3];
        for (j, ch) in self.channels.iter_mut().enumerate() {
            let res = ch.step(raw[j], basis);
            weights[j] = res.weight;
            recon[j] = ch.predict(basis);
        }
        (weights, Vec3::from_array(recon))
    }
}

/// Difference est - truth folded into (-180, 180] degrees.
fn angle_err_deg(est: f64, truth: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut d = (est - truth) % two_pi;
    if d > core::f64::consts::PI {
        d -= two_pi;
    } else if d <= -core::f64::consts::PI {
        d += two_pi;
    }
    d * 180.0 / core::f64::consts::PI
}

fn euler_err(est: Mat3, truth: Mat3) -> [f64; 3] {
    let e = euler_from_dcm(est);
    let t = euler_from_dcm(truth);
    [
        angle_err_deg(e.pitch, t.pitch),
        angle_err_deg(e.roll, t.roll),
        angle_err_deg(e.yaw, t.yaw),
    ]
}

/// Replays time-aligned streams through one aligner. Truth rows, when given,
/// are matched to epochs by timestamp and fill euler_err_deg.
pub fn run(
    cfg: AlignerConfig,
    imu: &[ImuSample],
    dvl: &[DvlMeas],
    truth: Option<&[(f64, Mat3)]>,
) -> Result<AlignmentTrace, AlignError> {
    if imu.is_empty() || dvl.is_empty() {
        return Err(AlignError::EmptyStream);
    }
    let mut aligner = Aligner::new(cfg)?;
    let mut trace = AlignmentTrace::default();
    let mut i = 0;
    let mut ti = 0;
    for meas in dvl {
        while i < imu.len() && imu[i].t < meas.t - 1e-9 {
            aligner.process_imu(imu[i])?;
            i += 1;
        }
        let mut rec = aligner.process_dvl(*meas)?;
        if let Some(rows) = truth {
            while ti < rows.len() && rows[ti].0 < meas.t - 1e-6 {
                ti += 1;
            }
            if ti < rows.len() && (rows[ti].0 - meas.t).abs() <= 1e-6 {
                rec.euler_err_deg = Some(euler_err(rec.att_est, rows[ti].1));
            }
        }
        trace.records.push(rec);
    }
    Ok(trace)
}
