//! Gyro-regularized template feature tracking.
//!
//! Feature positions are found by minimizing a template-matching energy on a
//! four-level image pyramid. When a calibrated 3-axis gyroscope is available,
//! the camera rotation between frames is integrated into a homography that
//! predicts where each feature should land, and a weak logarithmic penalty
//! pulls the minimizer towards that prediction. Strongly textured features are
//! still localized by the imagery; features that are ambiguous along an edge
//! fall back on the gyro.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and
//! everything touching the filesystem live in the `gyroprior` crate.
//!
//! # Layout
//! - [`imaging`]: frames, pyramids, bilinear sampling, patches, coarse registration.
//! - [`gyro`]: de-biasing, attitude integration, homographies, calibration, latency.
//! - [`energy`]: template energy, gyro penalty and their gradients.
//! - [`optimize`]: gradient descent with fast line search, multi-feature directions,
//!   coarse-to-fine driver.
//! - [`tracker`]: feature lifecycle and the four tracker variants.
//! - [`bench`]: degradation, synthetic scenes, track-length evaluation, parameter search.

#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bench;
pub mod energy;
mod error;
pub mod gyro;
pub mod imaging;
mod math;
pub mod optimize;
pub mod tracker;

pub use error::{Error, Result};

/// 2D point or displacement in pixel units.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 3-vector, used for rotation rates and homogeneous points.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 real matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
