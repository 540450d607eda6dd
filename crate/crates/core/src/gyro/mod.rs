//! From raw rotation rates to per-feature flow predictions.
//!
//! A camera that only rotates between two frames moves every image point
//! through the same homography `H = K̃ R K̃⁻¹`, where `R` is the rotation of
//! the gyro frame over the frame interval and `K̃` is the camera intrinsics
//! composed with the fixed gyro-to-camera rotation. Only the product `K̃`
//! is ever needed, so it is calibrated directly.

mod attitude;
mod calibrate;
mod homography;
mod latency;
mod stream;

pub use attitude::{integrate_rotation, integrate_rotation_debiased, Rotation};
pub use calibrate::{calibrate_k_tilde, calibration_residual};
pub use homography::{
    gyro_homography, predict_feature_positions, rotation_to_homography, CalibrationProfile,
    Homography,
};
pub use latency::{estimate_latency, FrameSeries};
pub use stream::{
    debias, estimate_bias, rotation_rate_summary, GyroSample, GyroStream, RateSummary,
    MIN_BIAS_SAMPLES,
};
