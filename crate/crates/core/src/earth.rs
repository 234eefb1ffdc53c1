//! Earth model: rotation rate and normal gravity resolved in the local ENU frame.

use crate::fp;
use crate::math::{vec3, Vec3};

/// WGS-84 Earth rotation rate, rad/s.
pub const OMEGA_IE: f64 = 7.292115e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeoParams {
    /// Latitude, rad. Frozen for the whole run.
    pub latitude: f64,
    /// Local gravity magnitude, m/s^2.
    pub gravity: f64,
    /// Earth rotation rate, rad/s.
    pub omega_ie: f64,
}

impl GeoParams {
    /// Normal gravity (Somigliana) at the given latitude, default Earth rate.
    pub fn from_latitude(latitude: f64) -> GeoParams {
        GeoParams { latitude, gravity: somigliana(latitude), omega_ie: OMEGA_IE }
    }

    pub fn is_valid(&self) -> bool {
        fp::abs(self.latitude) <= core::f64::consts::FRAC_PI_2
            && self.gravity > 0.0
            && self.omega_ie > 0.0
    }
}

/// GRS-80/WGS-84 normal gravity on the ellipsoid surface, m/s^2.
pub fn somigliana(latitude: f64) -> f64 {
    let s2 = fp::sin(latitude) * fp::sin(latitude);
    9.7803253359 * (1.0 + 0.00193185265241 * s2) / fp::sqrt(1.0 - 0.00669437999013 * s2)
}

/// Earth rate in ENU: [0, omega cos L, omega sin L].
pub fn earth_rate_n(geo: &GeoParams) -> Vec3 {
    vec3(0.0, geo.omega_ie * fp::cos(geo.latitude), geo.omega_ie * fp::sin(geo.latitude))
}

/// Gravity vector in ENU: [0, 0, -g].
pub fn gravity_n(geo: &GeoParams) -> Vec3 {
    vec3(0.0, 0.0, -geo.gravity)
}
