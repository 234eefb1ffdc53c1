//! Randomized invariants: rotation representations stay orthonormal and
//! round-trip, the Huber weight is a bounded-influence reweighting, and the
//! accumulated attitude matrix and filter covariance stay PSD no matter what
//! the measurements do.

use dvl_align::apparent::gamma;
use dvl_align::attitude::{dcm_from_euler, euler_from_dcm, KMatrix};
use dvl_align::math::{dcm_from_rotvec, vec3, Mat3, Quat, Vec3};
use dvl_align::robust::{huber_weight, ChannelFilter, RkfParams};
use dvl_align::strapdown::{two_sample_increment, ImuIncrements};
use proptest::prelude::*;

fn v3() -> impl Strategy<Value = Vec3> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| vec3(x, y, z))
}

fn max_entry_diff(a: Mat3, b: Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a.m[i][j] - b.m[i][j]).abs());
        }
    }
    worst
}

fn quad_form(p: &[[f64; 4]; 4], x: [f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += x[i] * p[i][j] * x[j];
        }
    }
    acc
}

fn frobenius(p: &[[f64; 4]; 4]) -> f64 {
    p.iter().flatten().map(|e| e * e).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn rotvec_dcm_is_orthonormal(theta in v3()) {
        let c = dcm_from_rotvec(theta);
        prop_assert!(max_entry_diff(c * c.transpose(), Mat3::IDENTITY) < 1e-12);
        prop_assert!((c.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quat_dcm_round_trip(theta in v3()) {
        let c = dcm_from_rotvec(theta);
        let q = Quat::from_dcm(c).unwrap();
        prop_assert!((q.norm() - 1.0).abs() < 1e-12);
        prop_assert!(max_entry_diff(q.to_dcm(), c) < 1e-12);
    }

    #[test]
    fn euler_dcm_round_trip(
        pitch in -1.4..1.4f64,
        roll in -3.1..3.1f64,
        yaw in -3.1..3.1f64,
    ) {
        let c = dcm_from_euler(pitch, roll, yaw);
        prop_assert!(max_entry_diff(c * c.transpose(), Mat3::IDENTITY) < 1e-12);
        let e = euler_from_dcm(c);
        prop_assert!(max_entry_diff(dcm_from_euler(e.pitch, e.roll, e.yaw), c) < 1e-12);
    }

    #[test]
    fn huber_weight_is_bounded_influence(zeta in -100.0..100.0f64, g in 0.1..5.0f64) {
        let w = huber_weight(zeta, g);
        prop_assert!(w > 0.0 && w <= 1.0);
        prop_assert_eq!(w == 1.0, zeta.abs() <= g);
        // clipped influence: the effective residual never exceeds the threshold
        prop_assert!(w * zeta.abs() <= g + 1e-12);
        prop_assert_eq!(w, huber_weight(-zeta, g));
        prop_assert!(huber_weight(zeta * 1.5, g) <= w + 1e-15);
    }

    #[test]
    fn k_matrix_stays_psd_for_arbitrary_pairs(
        pairs in prop::collection::vec((v3(), v3()), 2..20),
        x in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let mut k = KMatrix::new();
        for (beta, alpha) in &pairs {
            k.accumulate(*beta, *alpha);
        }
        let m = k.matrix();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(m[i][j], m[j][i]);
            }
        }
        let scale = frobenius(&m).max(1.0);
        prop_assert!(quad_form(&m, x) >= -1e-9 * scale);
        if let Ok(sol) = k.solve() {
            prop_assert!(sol.min_eigenvalue >= -1e-9 * scale);
        }
    }

    #[test]
    fn covariance_stays_symmetric_psd_under_any_measurements(
        meas in prop::collection::vec(-1e4..1e4f64, 5..60),
        x in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let mut f = ChannelFilter::new(&RkfParams::default()).unwrap();
        let omega = 7.292115e-5;
        for (m, z) in meas.iter().enumerate() {
            f.step(*z, gamma((m + 1) as f64, omega));
            let p = f.covariance();
            let scale = frobenius(&p).max(1.0);
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!((p[i][j] - p[j][i]).abs() <= 1e-9 * scale);
                }
            }
            prop_assert!(quad_form(&p, x) >= -1e-9 * scale);
        }
    }

    #[test]
    fn basis_keeps_trig_identity(t in 0.0..1e6f64) {
        let b = gamma(t, 7.292115e-5);
        prop_assert!((b.0[0] * b.0[0] + b.0[1] * b.0[1] - 1.0).abs() < 1e-12);
        prop_assert_eq!(b.0[2], t);
        prop_assert_eq!(b.0[3], 1.0);
    }

    #[test]
    fn two_sample_increment_reduces_to_sum_without_rotation(dv1 in v3(), dv2 in v3()) {
        let inc = ImuIncrements { dtheta1: Vec3::ZERO, dtheta2: Vec3::ZERO, dv1, dv2 };
        prop_assert_eq!(two_sample_increment(&inc), dv1 + dv2);
    }

    #[test]
    fn two_sample_corrections_scale_with_rotation(
        dth1 in v3(), dth2 in v3(), dv1 in v3(), dv2 in v3(),
    ) {
        // corrections are cross terms, so they are bounded by |dtheta| |dv|
        let s = 1e-4;
        let inc = ImuIncrements {
            dtheta1: dth1 * s,
            dtheta2: dth2 * s,
            dv1,
            dv2,
        };
        let corr = (two_sample_increment(&inc) - (dv1 + dv2)).norm();
        let bound = (dth1.norm() + dth2.norm()) * s * (dv1.norm() + dv2.norm());
        prop_assert!(corr <= bound + 1e-15);
    }
}
