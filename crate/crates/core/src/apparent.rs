//! Closed-form model of the accumulated gravity integral: the Earth-rotation basis
//! [cos wt, sin wt, t, 1] and the constant 3x4 coefficient matrices relating it to
//! the reference vector (and, rotated, to the observation vector).

use crate::earth::GeoParams;
use crate::fp;
use crate::math::{vec3, Mat3, Vec3};

/// Basis [cos(w t), sin(w t), t, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisVec(pub [f64; 4]);

pub fn gamma(t: f64, omega_ie: f64) -> BasisVec {
    BasisVec([fp::cos(omega_ie * t), fp::sin(omega_ie * t), t, 1.0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffRole {
    /// Maps the basis to the reference vector in the initial nav frame.
    Reference,
    /// Maps the basis to the observation vector in the initial body frame.
    Observation,
}

/// 3x4 coefficient matrix; rows are the x/y/z channels, columns the basis terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffMat {
    pub rows: [[f64; 4]; 3],
    pub role: CoeffRole,
}

impl CoeffMat {
    pub fn apply(&self, basis: BasisVec) -> Vec3 {
        let g = basis.0;
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row[0] * g[0] + row[1] * g[1] + row[2] * g[2] + row[3] * g[3];
        }
        Vec3::from_array(out)
    }

    pub fn evaluate(&self, t: f64, omega_ie: f64) -> Vec3 {
        self.apply(gamma(t, omega_ie))
    }

    /// Left-multiplies by a rotation: the observation-side coefficients for a
    /// constant attitude C are C * Phi.
    pub fn rotated(&self, c: Mat3) -> CoeffMat {
        let mut rows = [[0.0; 4]; 3];
        for (j, col) in (0..4).map(|j| (j, vec3(self.rows[0][j], self.rows[1][j], self.rows[2][j]))) {
            let r = c * col;
            rows[0][j] = r.x;
            rows[1][j] = r.y;
            rows[2][j] = r.z;
        }
        CoeffMat { rows, role: CoeffRole::Observation }
    }
}

/// Reference-side coefficients at a fixed latitude.
///
/// Columns pair up so that the t=0 evaluation vanishes (column 1 cancels column 4),
/// matching the zero initial condition of the gravity integral.
pub fn phi_matrix(geo: &GeoParams) -> CoeffMat {
    let (g, w, l) = (geo.gravity, geo.omega_ie, geo.latitude);
    let (cl, sl) = (fp::cos(l), fp::sin(l));
    CoeffMat {
        rows: [
            [g * cl / w, 0.0, 0.0, -g * cl / w],
            [0.0, g * cl * sl / w, -g * cl * sl, 0.0],
            [0.0, -g * cl * cl / w, -g * sl * sl, 0.0],
        ],
        role: CoeffRole::Reference,
    }
}
