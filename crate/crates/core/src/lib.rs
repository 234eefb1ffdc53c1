//! In-motion initial alignment for a strapdown INS aided by a Doppler velocity log.
//!
//! The alignment unknown is the constant rotation between the navigation and body
//! frames frozen at startup (n0 and b0). Raw IMU/DVL streams are folded into a pair
//! of integrated vectors related by that rotation; a per-channel Huber-robust Kalman
//! identifier fits the observation vector to a closed-form Earth-rotation basis and
//! rejects DVL outliers; the rotation is extracted as the minimum-eigenvalue
//! eigenvector of an accumulated attitude-profile matrix.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default `std` feature
//! and enable `libm` for embedded targets. [`sim`] provides a trajectory and sensor
//! simulator used by the test suite and the companion CLI.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("either the `std` or the `libm` feature must be enabled");

pub mod apparent;
pub mod attitude;
pub mod earth;
pub mod math;
pub mod pipeline;
pub mod robust;
pub mod sim;
pub mod strapdown;
pub mod vectors;

pub(crate) mod fp {
    //! Float functions available in both std and no_std builds.

    #[cfg(feature = "std")]
    mod imp {
        pub fn sin(x: f64) -> f64 {
            x.sin()
        }
        pub fn cos(x: f64) -> f64 {
            x.cos()
        }
        pub fn sqrt(x: f64) -> f64 {
            x.sqrt()
        }
        pub fn asin(x: f64) -> f64 {
            x.asin()
        }
        pub fn atan2(y: f64, x: f64) -> f64 {
            y.atan2(x)
        }
        pub fn abs(x: f64) -> f64 {
            x.abs()
        }
        pub fn round(x: f64) -> f64 {
            x.round()
        }
    }

    #[cfg(all(not(feature = "std"), feature = "libm"))]
    mod imp {
        pub fn sin(x: f64) -> f64 {
            libm::sin(x)
        }
        pub fn cos(x: f64) -> f64 {
            libm::cos(x)
        }
        pub fn sqrt(x: f64) -> f64 {
            libm::sqrt(x)
        }
        pub fn asin(x: f64) -> f64 {
            libm::asin(x)
        }
        pub fn atan2(y: f64, x: f64) -> f64 {
            libm::atan2(y, x)
        }
        pub fn abs(x: f64) -> f64 {
            libm::fabs(x)
        }
        pub fn round(x: f64) -> f64 {
            libm::round(x)
        }
    }

    pub use imp::*;
}
