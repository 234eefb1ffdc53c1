//! Per-channel 4-state parameter identifier with Huber reweighting. One scalar
//! measurement per epoch fits one row of the observation coefficient matrix;
//! outliers are down-weighted before the Kalman update so their influence on
//! the state is bounded.
//!
//! The covariance is carried as a square-root factor P = A A^T. The default
//! prior spans ten orders of magnitude against R and the basis grows with t,
//! which drives a plain covariance recursion indefinite; the factored form
//! keeps P positive semidefinite by construction.

use crate::apparent::BasisVec;
use crate::fp;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkfParamError {
    NonPositiveR,
    NonPositiveGamma,
    NegativeQDiag,
    NegativeP0Diag,
    ZeroReweightIters,
}

impl core::fmt::Display for RkfParamError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            RkfParamError::NonPositiveR => "measurement noise variance must be positive",
            RkfParamError::NonPositiveGamma => "huber threshold must be positive",
            RkfParamError::NegativeQDiag => "process noise diagonal must be nonnegative",
            RkfParamError::NegativeP0Diag => "initial covariance diagonal must be nonnegative",
            RkfParamError::ZeroReweightIters => "reweight iteration count must be at least 1",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for RkfParamError {}

/// Filter tuning. Defaults: gamma 1.345 (95% Gaussian efficiency),
/// R = (0.1 m/s)^2, Q = (1e-3)^2 I, P0 = (1e5)^2 I, single-pass reweighting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RkfParams {
    pub gamma: f64,
    pub r: f64,
    pub q_diag: [f64; 4],
    pub p0_diag: [f64; 4],
    /// 1 = single pass; >1 iterates the weight to a fixed point (capped at 5).
    pub max_reweight_iters: usize,
}

impl Default for RkfParams {
    fn default() -> Self {
        RkfParams {
            gamma: 1.345,
            r: 0.01,
            q_diag: [1e-6; 4],
            p0_diag: [1e10; 4],
            max_reweight_iters: 1,
        }
    }
}

impl RkfParams {
    pub fn validate(&self) -> Result<(), RkfParamError> {
        if !(self.r > 0.0) {
            return Err(RkfParamError::NonPositiveR);
        }
        if !(self.gamma > 0.0) {
            return Err(RkfParamError::NonPositiveGamma);
        }
        if self.q_diag.iter().any(|&q| !(q >= 0.0)) {
            return Err(RkfParamError::NegativeQDiag);
        }
        if self.p0_diag.iter().any(|&p| !(p >= 0.0)) {
            return Err(RkfParamError::NegativeP0Diag);
        }
        if self.max_reweight_iters == 0 {
            return Err(RkfParamError::ZeroReweightIters);
        }
        Ok(())
    }
}

/// Weight 1 inside the threshold, gamma/|zeta| outside; continuous at zero.
pub fn huber_weight(zeta: f64, gamma: f64) -> f64 {
    let az = fp::abs(zeta);
    if az <= gamma {
        1.0
    } else {
        gamma / az
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterStepResult {
    pub xhat_post: [f64; 4],
    pub p_post: [[f64; 4]; 4],
    pub zeta: f64,
    pub weight: f64,
    pub recon_meas: f64,
}

#[derive(Clone, Debug)]
pub struct ChannelFilter {
    pub xhat: [f64; 4],
    /// Square-root factor, P = a a^T. Not triangular after measurement updates.
    a: [[f64; 4]; 4],
    q_sqrt: [f64; 4],
    pub r: f64,
    pub gamma: f64,
    max_reweight_iters: usize,
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// In-place Householder triangularization; only the upper 4x4 block (R) is
/// meaningful afterwards.
fn triangularize_8x4(m: &mut [[f64; 4]; 8]) {
    for k in 0..4 {
        let mut norm2 = 0.0;
        for row in m.iter().skip(k) {
            norm2 += row[k] * row[k];
        }
        let norm = fp::sqrt(norm2);
        if norm == 0.0 {
            continue;
        }
        let alpha = if m[k][k] >= 0.0 { -norm } else { norm };
        let mut v = [0.0; 8];
        for i in k..8 {
            v[i] = m[i][k];
        }
        v[k] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        for j in k..4 {
            let mut d = 0.0;
            for i in k..8 {
                d += v[i] * m[i][j];
            }
            let s = beta * d;
            for i in k..8 {
                m[i][j] -= s * v[i];
            }
        }
    }
}

impl ChannelFilter {
    pub fn new(params: &RkfParams) -> Result<ChannelFilter, RkfParamError> {
        params.validate()?;
        let mut a = [[0.0; 4]; 4];
        let mut q_sqrt = [0.0; 4];
        for i in 0..4 {
            a[i][i] = fp::sqrt(params.p0_diag[i]);
            q_sqrt[i] = fp::sqrt(params.q_diag[i]);
        }
        Ok(ChannelFilter {
            xhat: [0.0; 4],
            a,
            q_sqrt,
            r: params.r,
            gamma: params.gamma,
            max_reweight_iters: params.max_reweight_iters.min(5),
        })
    }

    /// P = A A^T, symmetrized.
    pub fn covariance(&self) -> [[f64; 4]; 4] {
        let mut p = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += self.a[i][k] * self.a[j][k];
                }
                p[i][j] = s;
                p[j][i] = s;
            }
        }
        p
    }

    pub fn predict(&self, basis: BasisVec) -> f64 {
        dot4(&self.xhat, &basis.0)
    }

    /// Random-walk prior: state unchanged, P grows by Q. Carried out on the
    /// factor by re-triangularizing [A | sqrt(Q)].
    pub fn time_update(&mut self) {
        let mut m = [[0.0; 4]; 8];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.a[j][i];
            }
            m[4 + i][i] = self.q_sqrt[i];
        }
        triangularize_8x4(&mut m);
        for i in 0..4 {
            for j in 0..4 {
                self.a[i][j] = if j <= i { m[j][i] } else { 0.0 };
            }
        }
    }

    fn innovation_std(&self, basis: &BasisVec) -> f64 {
        let mut big_f = 0.0;
        for k in 0..4 {
            let mut fk = 0.0;
            for i in 0..4 {
                fk += self.a[i][k] * basis.0[i];
            }
            big_f += fk * fk;
        }
        fp::sqrt(big_f + self.r)
    }

    /// Innovation standardized by its full predicted spread (basis-projected
    /// prior covariance plus R). With zero prior uncertainty this reduces to
    /// the residual over sqrt(R). Dividing by sqrt(R) alone would flag every
    /// sample during cold start, when the prediction is still the zero prior
    /// and residuals are hundreds of sigma wide.
    pub fn normalized_innovation(&self, meas: f64, basis: BasisVec) -> f64 {
        (meas - self.predict(basis)) / self.innovation_std(&basis)
    }

    /// Convex blend toward the prediction. Weight 1 passes the measurement
    /// through bit-exactly so the clean path is identical to a plain update.
    pub fn reconstruct_measurement(&self, meas: f64, basis: BasisVec, weight: f64) -> f64 {
        if weight == 1.0 {
            meas
        } else {
            let pred = self.predict(basis);
            pred + weight * (meas - pred)
        }
    }

    /// Potter rank-one update of the factor for one scalar measurement.
    pub fn measurement_update(&mut self, recon_meas: f64, basis: BasisVec) {
        let g = basis.0;
        let pred = dot4(&self.xhat, &g);
        let mut f = [0.0; 4];
        for k in 0..4 {
            for i in 0..4 {
                f[k] += self.a[i][k] * g[i];
            }
        }
        let big_f = dot4(&f, &f);
        let s = big_f + self.r;
        debug_assert!(s > 0.0);
        let mut af = [0.0; 4];
        for i in 0..4 {
            af[i] = dot4(&self.a[i], &f);
        }
        let innov = recon_meas - pred;
        for i in 0..4 {
            self.xhat[i] += af[i] / s * innov;
        }
        if big_f > 0.0 {
            let beta = (1.0 - fp::sqrt(self.r / s)) / big_f;
            for i in 0..4 {
                for k in 0..4 {
                    self.a[i][k] -= beta * af[i] * f[k];
                }
            }
        }
    }

    fn step_inner(&mut self, meas: f64, basis: BasisVec, robust: bool) -> FilterStepResult {
        self.time_update();
        let zeta = self.normalized_innovation(meas, basis);
        let mut weight = if robust { huber_weight(zeta, self.gamma) } else { 1.0 };
        let mut recon = self.reconstruct_measurement(meas, basis, weight);
        if robust && self.max_reweight_iters > 1 {
            let prior = self.clone();
            let sd = prior.innovation_std(&basis);
            self.measurement_update(recon, basis);
            for _ in 1..self.max_reweight_iters {
                let next = huber_weight((meas - self.predict(basis)) / sd, self.gamma);
                if fp::abs(next - weight) < 1e-10 {
                    break;
                }
                weight = next;
                recon = prior.reconstruct_measurement(meas, basis, weight);
                self.xhat = prior.xhat;
                self.a = prior.a;
                self.measurement_update(recon, basis);
            }
        } else {
            self.measurement_update(recon, basis);
        }
        FilterStepResult {
            xhat_post: self.xhat,
            p_post: self.covariance(),
            zeta,
            weight,
            recon_meas: recon,
        }
    }

    /// Full epoch: time update, standardize, weight, reconstruct, update.
    pub fn step(&mut self, meas: f64, basis: BasisVec) -> FilterStepResult {
        self.step_inner(meas, basis, true)
    }

    /// Same epoch with the weight pinned to 1 (no outlier handling).
    pub fn step_plain(&mut self, meas: f64, basis: BasisVec) -> FilterStepResult {
        self.step_inner(meas, basis, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apparent::{gamma, phi_matrix};
    use crate::earth::GeoParams;
    use crate::math::{dcm_from_rotvec, eigh_sym4, vec3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    const LAT: f64 = 0.5595088676996;
    const WIE: f64 = crate::earth::OMEGA_IE;

    fn zero_p_filter() -> ChannelFilter {
        ChannelFilter::new(&RkfParams { p0_diag: [0.0; 4], q_diag: [0.0; 4], ..RkfParams::default() })
            .unwrap()
    }

    fn trace(p: &[[f64; 4]; 4]) -> f64 {
        p[0][0] + p[1][1] + p[2][2] + p[3][3]
    }

    #[test]
    fn params_validate() {
        assert!(RkfParams::default().validate().is_ok());
        assert_eq!(
            RkfParams { r: 0.0, ..RkfParams::default() }.validate(),
            Err(RkfParamError::NonPositiveR)
        );
        assert_eq!(
            RkfParams { gamma: -1.0, ..RkfParams::default() }.validate(),
            Err(RkfParamError::NonPositiveGamma)
        );
        assert_eq!(
            RkfParams { max_reweight_iters: 0, ..RkfParams::default() }.validate(),
            Err(RkfParamError::ZeroReweightIters)
        );
    }

    #[test]
    fn time_update_zero_q_keeps_p() {
        let mut f =
            ChannelFilter::new(&RkfParams { p0_diag: [1.0; 4], q_diag: [0.0; 4], ..Default::default() })
                .unwrap();
        let before = f.covariance();
        f.time_update();
        let after = f.covariance();
        for i in 0..4 {
            for j in 0..4 {
                assert!((after[i][j] - before[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn time_update_adds_q() {
        let mut f =
            ChannelFilter::new(&RkfParams { p0_diag: [1.0; 4], ..Default::default() }).unwrap();
        f.time_update();
        let p = f.covariance();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 + 1e-6 } else { 0.0 };
                assert!((p[i][j] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn time_update_trace_nondecreasing() {
        let mut f = ChannelFilter::new(&RkfParams::default()).unwrap();
        let mut prev = trace(&f.covariance());
        for _ in 0..10 {
            f.time_update();
            let t = trace(&f.covariance());
            assert!(t >= prev - 1e-9);
            prev = t;
        }
    }

    #[test]
    fn normalized_innovation_examples() {
        let f = zero_p_filter();
        let b = gamma(0.0, WIE);
        assert_eq!(f.normalized_innovation(0.0, b), 0.0);
        assert!((f.normalized_innovation(0.1, b) - 1.0).abs() < 1e-12);
        assert!((f.normalized_innovation(30.0, b) - 300.0).abs() < 1e-9);
    }

    #[test]
    fn huber_weight_examples() {
        assert_eq!(huber_weight(0.5, 1.345), 1.0);
        assert_eq!(huber_weight(0.0, 1.345), 1.0);
        assert_eq!(huber_weight(1.345, 1.345), 1.0);
        assert!((huber_weight(2.690, 1.345) - 0.5).abs() < 1e-15);
        assert!((huber_weight(-2.690, 1.345) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reconstruct_weight_one_is_bit_exact() {
        let mut f = zero_p_filter();
        f.xhat = [0.2, 0.0, 0.0, 0.0];
        let meas = 0.1 + 0.2 + 0.3; // value with rounding headroom
        assert_eq!(f.reconstruct_measurement(meas, gamma(0.0, WIE), 1.0), meas);
    }

    #[test]
    fn reconstruct_small_weight_approaches_prediction() {
        let mut f = zero_p_filter();
        f.xhat = [0.2, 0.0, 0.0, 0.0];
        let b = gamma(0.0, WIE);
        let pred = f.xhat[0] + f.xhat[3];
        assert!((f.reconstruct_measurement(30.0, b, 1e-12) - pred).abs() < 1e-9);
    }

    #[test]
    fn spike_reconstruction_hand_value() {
        // prediction 0.2, measurement 30: zeta = 298, weight = 1.345/298,
        // reconstructed = 0.2 + (1.345/298) * 29.8
        let mut f = zero_p_filter();
        f.xhat = [0.2, 0.0, 0.0, 0.0];
        let b = gamma(0.0, WIE);
        let res = f.step(30.0, b);
        assert!((res.zeta - 298.0).abs() < 1e-9);
        let want = 0.2 + (1.345 / 298.0) * 29.8;
        assert!((res.recon_meas - want).abs() < 1e-12);
        assert!((res.recon_meas - 0.3345).abs() < 1e-4);
        // zero prior covariance: gain is zero, state must not move
        assert_eq!(res.xhat_post, [0.2, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn huge_r_freezes_state() {
        let mut f = ChannelFilter::new(&RkfParams {
            r: 1e30,
            p0_diag: [1.0; 4],
            q_diag: [0.0; 4],
            ..Default::default()
        })
        .unwrap();
        f.step(5.0, gamma(3.0, WIE));
        for x in f.xhat {
            assert!(x.abs() < 1e-20);
        }
    }

    /// Dense-covariance reference filter (Joseph-form update) for equivalence
    /// checks at a scale where both forms are well-conditioned.
    struct DenseKf {
        x: [f64; 4],
        p: [[f64; 4]; 4],
        q: f64,
        r: f64,
    }

    impl DenseKf {
        fn step(&mut self, meas: f64, g: [f64; 4]) {
            for i in 0..4 {
                self.p[i][i] += self.q;
            }
            let mut pg = [0.0; 4];
            for i in 0..4 {
                pg[i] = dot4(&self.p[i], &g);
            }
            let s = dot4(&g, &pg) + self.r;
            let k: [f64; 4] = core::array::from_fn(|i| pg[i] / s);
            let innov = meas - dot4(&self.x, &g);
            for i in 0..4 {
                self.x[i] += k[i] * innov;
            }
            // Joseph: (I-KG)P(I-KG)^T + K R K^T
            let mut ikg = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    ikg[i][j] = (if i == j { 1.0 } else { 0.0 }) - k[i] * g[j];
                }
            }
            let mut tmp = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        tmp[i][j] += ikg[i][l] * self.p[l][j];
                    }
                }
            }
            let mut pn = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        pn[i][j] += tmp[i][l] * ikg[j][l];
                    }
                    pn[i][j] += k[i] * self.r * k[j];
                }
            }
            self.p = pn;
        }
    }

    #[test]
    fn sqrt_form_matches_dense_kf_at_benign_scale() {
        let params = RkfParams { p0_diag: [1.0; 4], q_diag: [1e-6; 4], ..Default::default() };
        let mut sqrt_f = ChannelFilter::new(&params).unwrap();
        let mut dense = DenseKf { x: [0.0; 4], p: [[0.0; 4]; 4], q: 1e-6, r: params.r };
        for i in 0..4 {
            dense.p[i][i] = 1.0;
        }
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let normal = StandardNormal;
        for m in 1..=100 {
            let g = gamma(m as f64, WIE);
            let noise: f64 = normal.sample(&mut rng);
            let meas = 0.3 * g.0[2].sin() + 0.1 * noise;
            sqrt_f.step_plain(meas, g);
            dense.step(meas, g.0);
            for i in 0..4 {
                assert!((sqrt_f.xhat[i] - dense.x[i]).abs() < 1e-10, "epoch {m} state {i}");
            }
            let p = sqrt_f.covariance();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((p[i][j] - dense.p[i][j]).abs() < 1e-10, "epoch {m} P[{i}][{j}]");
                }
            }
        }
    }

    #[test]
    fn clean_fit_predicts_in_and_out_of_sample() {
        let geo = GeoParams::from_latitude(LAT);
        let c = dcm_from_rotvec(vec3(0.2, -0.5, 1.0));
        let xi = phi_matrix(&geo).rotated(c);
        for (ch, row) in xi.rows.iter().enumerate() {
            let mut f = ChannelFilter::new(&RkfParams::default()).unwrap();
            for m in 1..=200 {
                let b = gamma(m as f64, geo.omega_ie);
                let meas = dot4(row, &b.0);
                let res = f.step(meas, b);
                if m >= 100 {
                    assert!(
                        (f.predict(b) - meas).abs() < 5e-3,
                        "channel {ch} epoch {m} fit residual"
                    );
                }
                assert!(res.weight == 1.0 || m < 3, "clean data must not be clipped");
            }
            // cos/sin columns are nearly collinear with the constant/ramp
            // columns over this horizon, so individual coefficients are not
            // identifiable; the fitted function must still extrapolate
            // measured drift 0.29..0.52 at +60 s on a ~1e3-magnitude function
            let mut worst: f64 = 0.0;
            for m in 201..=260 {
                let b = gamma(m as f64, geo.omega_ie);
                worst = worst.max((f.predict(b) - dot4(row, &b.0)).abs());
            }
            assert!(worst < 1.0, "channel {ch} extrapolation max {worst}");
        }
    }

    #[test]
    fn covariance_stays_psd_over_1000_harsh_steps() {
        let mut f = ChannelFilter::new(&RkfParams::default()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let normal = StandardNormal;
        for m in 1..=1000 {
            let b = gamma(m as f64, WIE);
            let noise: f64 = normal.sample(&mut rng);
            f.step(0.5 * noise, b);
            if m % 100 == 0 {
                let p = f.covariance();
                let (vals, _) = eigh_sym4(p);
                assert!(vals[0] >= -1e-10 * vals[3].max(1.0), "epoch {m}: {vals:?}");
                for i in 0..4 {
                    for j in 0..4 {
                        assert_eq!(p[i][j], p[j][i]);
                    }
                }
            }
        }
    }

    fn saturation_spread(row: [f64; 4], omega: f64) -> f64 {
        let mut f = ChannelFilter::new(&RkfParams::default()).unwrap();
        for m in 1..=20 {
            let b = gamma(m as f64, omega);
            f.step(dot4(&row, &b.0), b);
        }
        let b = gamma(21.0, omega);
        let base = dot4(&row, &b.0);
        let mut f1 = f.clone();
        let mut f2 = f.clone();
        let before = f.xhat;
        let r1 = f1.step(base + 1e6, b);
        let r2 = f2.step(base + 2e6, b);
        assert!(r1.weight < 0.01 && r2.weight < 0.01);
        let mut spread: f64 = 0.0;
        for i in 0..4 {
            let d1 = f1.xhat[i] - before[i];
            let d2 = f2.xhat[i] - before[i];
            spread = spread.max((d1 - d2).abs());
        }
        spread
    }

    #[test]
    fn saturated_update_ignores_outlier_magnitude() {
        // clamped update depends only on the sign of the innovation; at unit
        // scale the two spikes produce bit-near-identical state changes
        let spread = saturation_spread([0.3, -0.2, 0.5, 0.1], 0.3);
        assert!(spread < 1e-12, "unit-scale saturation spread {spread}");
        // at field scale the update is quantized to the state's ulp grid
        // (entries reach ~1e5), so the bound scales with that grid
        let geo = GeoParams::from_latitude(LAT);
        let row = phi_matrix(&geo).rows[0];
        let scale = row.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let spread = saturation_spread(row, geo.omega_ie);
        assert!(
            spread < 16.0 * f64::EPSILON * scale,
            "field-scale saturation spread {spread} vs scale {scale}"
        );
    }

    #[test]
    fn plain_step_equals_robust_step_inside_threshold() {
        let geo = GeoParams::from_latitude(LAT);
        let row = phi_matrix(&geo).rows[1];
        let mut robust = ChannelFilter::new(&RkfParams::default()).unwrap();
        let mut plain = ChannelFilter::new(&RkfParams::default()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let normal = StandardNormal;
        for m in 1..=300 {
            let b = gamma(m as f64, geo.omega_ie);
            let noise: f64 = normal.sample(&mut rng);
            let meas = dot4(&row, &b.0) + 0.02 * noise; // well inside gamma
            let rr = robust.step(meas, b);
            let rp = plain.step_plain(meas, b);
            if rr.weight == 1.0 {
                assert_eq!(rr.xhat_post, rp.xhat_post, "epoch {m}");
                assert_eq!(rr.p_post, rp.p_post, "epoch {m}");
            } else {
                // divergence is permitted only when the robust path clipped
                break;
            }
        }
    }

    #[test]
    fn contaminated_stream_spikes_flagged_clean_epochs_kept() {
        let geo = GeoParams::from_latitude(LAT);
        let row = phi_matrix(&geo).rows[0];
        let spikes: [(usize, f64); 8] = [
            (50, 30.0),
            (120, -22.0),
            (200, 12.0),
            (260, -5.0),
            (330, 28.0),
            (420, -15.0),
            (480, 8.0),
            (560, -30.0),
        ];
        let mut f = ChannelFilter::new(&RkfParams::default()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let normal = StandardNormal;
        let mut clean_total = 0usize;
        let mut clean_kept = 0usize;
        for m in 1..=600 {
            let b = gamma(m as f64, geo.omega_ie);
            let noise: f64 = normal.sample(&mut rng);
            let spike = spikes.iter().find(|(e, _)| *e == m).map(|(_, a)| *a);
            let meas = dot4(&row, &b.0) + 0.1 * noise + spike.unwrap_or(0.0);
            let res = f.step(meas, b);
            if spike.is_some() {
                assert!(res.weight < 0.1, "spike at epoch {m} got weight {}", res.weight);
            } else if m > 10 {
                clean_total += 1;
                if res.weight == 1.0 {
                    clean_kept += 1;
                }
            }
        }
        let frac = clean_kept as f64 / clean_total as f64;
        assert!(frac >= 0.95, "clean epochs kept: {frac}");
    }

    #[test]
    fn iterated_reweighting_converges_and_matches_single_pass_on_clean_data() {
        let geo = GeoParams::from_latitude(LAT);
        let row = phi_matrix(&geo).rows[2];
        let mut single = ChannelFilter::new(&RkfParams::default()).unwrap();
        let mut iterated =
            ChannelFilter::new(&RkfParams { max_reweight_iters: 5, ..Default::default() }).unwrap();
        for m in 1..=50 {
            let b = gamma(m as f64, geo.omega_ie);
            let meas = dot4(&row, &b.0);
            let rs = single.step(meas, b);
            let ri = iterated.step(meas, b);
            // clean data never clips, so the fixed point is the first pass
            assert_eq!(rs.xhat_post, ri.xhat_post, "epoch {m}");
        }
        // an outlier still gets a small weight under iteration
        let b = gamma(51.0, geo.omega_ie);
        let res = iterated.step(dot4(&row, &b.0) + 25.0, b);
        assert!(res.weight < 0.1);
    }
}
