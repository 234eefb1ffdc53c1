//! Fixed-size linear algebra: 3-vectors, 3x3 matrices, quaternions, and a Jacobi
//! eigensolver for symmetric 4x4 matrices.

use crate::fp;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = vec3(0.0, 0.0, 0.0);

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        fp::sqrt(self.dot(self))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Vec3 {
        vec3(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        vec3(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        vec3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        vec3(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        vec3(self.x * s, self.y * s, self.z * s)
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub const ZERO: Mat3 = Mat3 { m: [[0.0; 3]; 3] };

    pub fn from_rows(r0: [f64; 3], r1: [f64; 3], r2: [f64; 3]) -> Mat3 {
        Mat3 { m: [r0, r1, r2] }
    }

    pub fn transpose(self) -> Mat3 {
        let m = self.m;
        Mat3 {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    /// Max-abs deviation of C^T C from the identity.
    pub fn orthonormality_error(self) -> f64 {
        let g = self.transpose() * self;
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                e = e.max(fp::abs(g.m[i][j] - target));
            }
        }
        e
    }

    pub fn det(self) -> f64 {
        let m = self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn is_dcm(self, tol: f64) -> bool {
        self.orthonormality_error() < tol && fp::abs(self.det() - 1.0) < tol
    }

    /// Nearest orthonormal matrix for an input already close to one
    /// (two Newton iterations of the polar decomposition).
    pub fn reorthonormalize(self) -> Mat3 {
        let mut c = self;
        for _ in 0..2 {
            let ctc = c.transpose() * c;
            // C <- C (3I - C^T C) / 2
            let mut corr = Mat3::ZERO;
            for i in 0..3 {
                for j in 0..3 {
                    corr.m[i][j] = (if i == j { 3.0 } else { 0.0 } - ctc.m[i][j]) * 0.5;
                }
            }
            c = c * corr;
        }
        c
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        Mat3 { m: r }
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        vec3(
            self.m[0][0] * v.x + self.m[0][1] * v.y + self.m[0][2] * v.z,
            self.m[1][0] * v.x + self.m[1][1] * v.y + self.m[1][2] * v.z,
            self.m[2][0] * v.x + self.m[2][1] * v.y + self.m[2][2] * v.z,
        )
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        Mat3 { m: r }
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut r = self.m;
        for row in &mut r {
            for v in row {
                *v *= s;
            }
        }
        Mat3 { m: r }
    }
}

/// skew(v) u = v x u.
pub fn skew(v: Vec3) -> Mat3 {
    Mat3::from_rows([0.0, -v.z, v.y], [v.z, 0.0, -v.x], [-v.y, v.x, 0.0])
}

/// Rodrigues formula. The small-angle branch keeps sin(n)/n and (1-cos n)/n^2
/// well-defined as n -> 0.
pub fn dcm_from_rotvec(theta: Vec3) -> Mat3 {
    let n = theta.norm();
    let (a, b) = if n < 1e-8 {
        (1.0 - n * n / 6.0, 0.5 - n * n / 24.0)
    } else {
        (fp::sin(n) / n, (1.0 - fp::cos(n)) / (n * n))
    };
    let k = skew(theta);
    Mat3::IDENTITY + k * a + (k * k) * b
}

/// Unit quaternion, scalar-first Hamilton convention, canonical sign w >= 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn norm(self) -> f64 {
        fp::sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
    }

    pub fn canonicalized(self) -> Quat {
        if self.w < 0.0 {
            Quat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
        } else {
            self
        }
    }

    pub fn normalized(self) -> Quat {
        let n = self.norm();
        Quat { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    pub fn to_dcm(self) -> Mat3 {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Mat3::from_rows(
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        )
    }

    /// Shepperd's method: pick the largest of the four pivots for stability.
    pub fn from_dcm(c: Mat3) -> Result<Quat, NotOrthonormal> {
        if !c.is_dcm(1e-6) {
            return Err(NotOrthonormal);
        }
        let m = c.m;
        let tr = m[0][0] + m[1][1] + m[2][2];
        let q = if tr > m[0][0] && tr > m[1][1] && tr > m[2][2] {
            let s = fp::sqrt(tr + 1.0) * 2.0;
            Quat {
                w: 0.25 * s,
                x: (m[2][1] - m[1][2]) / s,
                y: (m[0][2] - m[2][0]) / s,
                z: (m[1][0] - m[0][1]) / s,
            }
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = fp::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;
            Quat {
                w: (m[2][1] - m[1][2]) / s,
                x: 0.25 * s,
                y: (m[0][1] + m[1][0]) / s,
                z: (m[0][2] + m[2][0]) / s,
            }
        } else if m[1][1] > m[2][2] {
            let s = fp::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;
            Quat {
                w: (m[0][2] - m[2][0]) / s,
                x: (m[0][1] + m[1][0]) / s,
                y: 0.25 * s,
                z: (m[1][2] + m[2][1]) / s,
            }
        } else {
            let s = fp::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;
            Quat {
                w: (m[1][0] - m[0][1]) / s,
                x: (m[0][2] + m[2][0]) / s,
                y: (m[1][2] + m[2][1]) / s,
                z: 0.25 * s,
            }
        };
        Ok(q.normalized().canonicalized())
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotOrthonormal;

/// Eigendecomposition of a symmetric 4x4 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending with matching unit eigenvectors as columns.
/// Convergence: all off-diagonals below 1e-13 * max|a_ij|, at most 100 sweeps.
pub fn eigh_sym4(a: [[f64; 4]; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = a;
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut scale: f64 = 0.0;
    for row in &a {
        for &x in row {
            scale = scale.max(fp::abs(x));
        }
    }
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let mut off: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                off = off.max(fp::abs(a[i][j]));
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                if fp::abs(a[p][q]) <= tol {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + fp::sqrt(1.0 + theta * theta))
                } else {
                    1.0 / (theta - fp::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / fp::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in &mut v {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_unstable_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let mut vals = [0.0; 4];
    let mut vecs = [[0.0; 4]; 4];
    for (dst, &src) in order.iter().enumerate() {
        vals[dst] = a[src][src];
        for k in 0..4 {
            vecs[k][dst] = v[k][src];
        }
    }
    (vals, vecs)
}
