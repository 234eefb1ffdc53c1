//! Attitude determination from accumulated vector pairs: a 4x4 profile matrix
//! whose minimum-eigenvalue eigenvector is the constant alignment quaternion,
//! plus the chain rule recovering the current attitude and ENU Euler angles.

use crate::fp;
use crate::math::{eigh_sym4, skew, Mat3, Quat, Vec3};

/// Eigengap below this is treated as rank-deficient accumulation.
const EIGENGAP_MIN: f64 = 1e-9;

/// Accumulated profile matrix. Symmetric PSD; grows by one rank-deficient
/// increment per vector pair.
#[derive(Clone, Debug, Default)]
pub struct KMatrix {
    k: [[f64; 4]; 4],
    pairs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Underdetermined {
    pub pairs: usize,
    pub eigengap: f64,
}

impl core::fmt::Display for Underdetermined {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "attitude underdetermined after {} pairs (eigengap {:.3e})",
            self.pairs, self.eigengap
        )
    }
}

impl core::error::Error for Underdetermined {}

#[derive(Clone, Copy, Debug)]
pub struct AttitudeSolution {
    /// Rotation from the initial nav frame to the initial body frame.
    pub q: Quat,
    pub c_n0_b0: Mat3,
    pub min_eigenvalue: f64,
    pub eigengap: f64,
}

impl KMatrix {
    pub fn new() -> KMatrix {
        KMatrix::default()
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        self.k
    }

    /// Adds ([beta x+] - [alpha x-])^T ([beta x+] - [alpha x-]) where the two
    /// operators are the left/right quaternion-multiplication matrices of the
    /// pure-vector quaternions.
    pub fn accumulate(&mut self, beta: Vec3, alpha: Vec3) {
        let d = beta - alpha;
        let s = skew(beta + alpha);
        // b[0][0] = 0, first row -d, first column d, lower-right skew(beta+alpha)
        let mut b = [[0.0; 4]; 4];
        b[0][1] = -d.x;
        b[0][2] = -d.y;
        b[0][3] = -d.z;
        b[1][0] = d.x;
        b[2][0] = d.y;
        b[3][0] = d.z;
        for i in 0..3 {
            for j in 0..3 {
                b[i + 1][j + 1] = s.m[i][j];
            }
        }
        for i in 0..4 {
            for j in i..4 {
                let mut acc = 0.0;
                for row in &b {
                    acc += row[i] * row[j];
                }
                self.k[i][j] += acc;
                if j != i {
                    self.k[j][i] = self.k[i][j];
                }
            }
        }
        self.pairs += 1;
    }

    /// Minimum-eigenvalue eigenvector of K, canonicalized to w >= 0. Fails
    /// while fewer than two pairs are in, or while the two smallest
    /// eigenvalues are indistinguishable (collinear accumulation).
    pub fn solve(&self) -> Result<AttitudeSolution, Underdetermined> {
        if self.pairs < 2 {
            return Err(Underdetermined { pairs: self.pairs, eigengap: 0.0 });
        }
        let (vals, vecs) = eigh_sym4(self.k);
        let eigengap = vals[1] - vals[0];
        if eigengap <= EIGENGAP_MIN {
            return Err(Underdetermined { pairs: self.pairs, eigengap });
        }
        let q = Quat { w: vecs[0][0], x: vecs[1][0], y: vecs[2][0], z: vecs[3][0] }
            .normalized()
            .canonicalized();
        Ok(AttitudeSolution { q, c_n0_b0: q.to_dcm(), min_eigenvalue: vals[0], eigengap })
    }
}

impl AttitudeSolution {
    /// Chain rule: attitude now = (nav rotation since start)^T (alignment)^T
    /// (body rotation since start).
    pub fn current_attitude(&self, c_n_n0: Mat3, c_b_b0: Mat3) -> Mat3 {
        c_n_n0.transpose() * self.c_n0_b0.transpose() * c_b_b0
    }
}

/// ENU Euler angles. Yaw is counterclockwise from north about up, pitch about
/// east, roll about north; C_b^n = Rz(yaw) Rx(pitch) Ry(roll).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub pitch: f64,
    pub roll: f64,
    pub yaw: f64,
    /// Pitch within 1e-6 rad of +-pi/2: yaw and roll are not separable.
    pub gimbal_lock: bool,
}

pub fn euler_from_dcm(c: Mat3) -> EulerAngles {
    let s = c.m[2][1].clamp(-1.0, 1.0);
    let pitch = fp::asin(s);
    EulerAngles {
        pitch,
        roll: fp::atan2(-c.m[2][0], c.m[2][2]),
        yaw: fp::atan2(-c.m[0][1], c.m[1][1]),
        gimbal_lock: fp::abs(pitch) > core::f64::consts::FRAC_PI_2 - 1e-6,
    }
}

pub fn dcm_from_euler(pitch: f64, roll: f64, yaw: f64) -> Mat3 {
    let (sp, cp) = (fp::sin(pitch), fp::cos(pitch));
    let (sr, cr) = (fp::sin(roll), fp::cos(roll));
    let (sy, cy) = (fp::sin(yaw), fp::cos(yaw));
    let rz = Mat3::from_rows([cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]);
    let rx = Mat3::from_rows([1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]);
    let ry = Mat3::from_rows([cr, 0.0, sr], [0.0, 1.0, 0.0], [-sr, 0.0, cr]);
    rz * rx * ry
}
