use alloc::vec::Vec;

use super::{integrate_rotation_debiased, GyroStream, Rotation};
use crate::{Error, Mat3, Result, Vec2, Vec3};

const SINGULAR_DET: f64 = 1e-12;
const MIN_HOMOGENEOUS_W: f64 = 1e-12;

/// Everything needed to turn gyro rates into pixel flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationProfile {
    /// Camera intrinsics times the gyro-to-camera rotation, scaled so that
    /// the bottom-right entry is 1.
    pub k_tilde: Mat3,
    /// Gyro bias in rad/s, subtracted from every sample.
    pub bias: Vec3,
    /// Gyro clock minus camera clock, in seconds. An event stamped `t` by the
    /// camera is stamped `t + latency` by the gyro.
    pub latency: f64,
}

impl CalibrationProfile {
    /// Normalizes `k_tilde` to a unit bottom-right entry and checks that it is
    /// invertible.
    pub fn new(k_tilde: Mat3, bias: Vec3, latency: f64) -> Result<Self> {
        if !k_tilde.iter().all(|v| v.is_finite()) || !bias.iter().all(|v| v.is_finite()) {
            return Err(Error::Calibration("non-finite calibration value"));
        }
        if !latency.is_finite() {
            return Err(Error::Calibration("non-finite latency"));
        }
        let k22 = k_tilde[(2, 2)];
        if k22.abs() < SINGULAR_DET {
            return Err(Error::Calibration("k_tilde[2][2] is zero; cannot normalize"));
        }
        let k = k_tilde / k22;
        if !is_invertible(&k) {
            return Err(Error::Calibration("k_tilde is singular"));
        }
        Ok(Self { k_tilde: k, bias, latency })
    }

    /// Pinhole intrinsics with no gyro-to-camera rotation.
    pub fn pinhole(focal: f64, cx: f64, cy: f64) -> Result<Self> {
        Self::new(
            Mat3::new(focal, 0.0, cx, 0.0, focal, cy, 0.0, 0.0, 1.0),
            Vec3::zeros(),
            0.0,
        )
    }
}

fn is_invertible(m: &Mat3) -> bool {
    let det = m.determinant();
    let n = m.norm();
    let scale = n * n * n;
    det.is_finite() && scale > 0.0 && det.abs() > SINGULAR_DET * scale
}

/// Invertible projective map of homogeneous image points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    matrix: Mat3,
}

impl Homography {
    pub fn new(matrix: Mat3) -> Result<Self> {
        if !is_invertible(&matrix) {
            return Err(Error::Calibration("homography is singular"));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: Mat3::identity() }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.try_inverse().expect("checked invertible at construction") }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Homography) -> Self {
        Self { matrix: self.matrix * first.matrix }
    }

    /// Maps `p`, or `None` when the image lands at or behind infinity.
    pub fn apply(&self, p: Vec2) -> Option<Vec2> {
        let h = self.matrix * Vec3::new(p.x, p.y, 1.0);
        (h.z > MIN_HOMOGENEOUS_W).then(|| Vec2::new(h.x / h.z, h.y / h.z))
    }
}

/// `H = K̃ R K̃⁻¹`.
pub fn rotation_to_homography(rotation: &Rotation, cal: &CalibrationProfile) -> Result<Homography> {
    let k_inv = cal
        .k_tilde
        .try_inverse()
        .ok_or(Error::Calibration("k_tilde is singular"))?;
    Homography::new(cal.k_tilde * rotation.matrix() * k_inv)
}

/// Maps each position through `h`. Points whose third homogeneous coordinate
/// is not positive come back as [`Error::DegeneratePoint`] with their index.
pub fn predict_feature_positions(positions: &[Vec2], h: &Homography) -> Vec<Result<Vec2>> {
    positions
        .iter()
        .enumerate()
        .map(|(index, &p)| h.apply(p).ok_or(Error::DegeneratePoint { index }))
        .collect()
}

/// Homography predicted by the gyro between camera times `t_prev` and `t_cur`.
///
/// Rates are de-biased with `cal.bias` and the integration window is shifted
/// onto the gyro clock by `cal.latency`.
pub fn gyro_homography(
    stream: &GyroStream,
    cal: &CalibrationProfile,
    t_prev: f64,
    t_cur: f64,
) -> Result<Homography> {
    let attitude =
        integrate_rotation_debiased(stream, cal.bias, t_prev + cal.latency, t_cur + cal.latency)?;
    rotation_to_homography(&attitude.inverse(), cal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn camera() -> CalibrationProfile {
        CalibrationProfile::pinhole(500.0, 320.0, 240.0).unwrap()
    }

    #[test]
    fn identity_rotation_gives_identity_homography() {
        let h = rotation_to_homography(&Rotation::identity(), &camera()).unwrap();
        assert!((h.matrix() - Mat3::identity()).norm() < 1e-12);
        let pts = vec![Vec2::new(3.5, 7.25), Vec2::new(600.0, 10.0)];
        let out: Vec<_> = predict_feature_positions(&pts, &h).into_iter().map(Result::unwrap).collect();
        for (a, b) in pts.iter().zip(&out) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn identity_k_conjugates_to_rotation() {
        let cal = CalibrationProfile::new(Mat3::identity(), Vec3::zeros(), 0.0).unwrap();
        let r = Rotation::from_axis_angle(Vec3::z(), 0.3);
        let h = rotation_to_homography(&r, &cal).unwrap();
        assert!((h.matrix() - r.matrix()).norm() < 1e-15);
    }

    #[test]
    fn calibration_profile_normalizes_and_validates() {
        let k = Mat3::new(1000.0, 0.0, 640.0, 0.0, 1000.0, 480.0, 0.0, 0.0, 2.0);
        let c = CalibrationProfile::new(k, Vec3::zeros(), 0.0).unwrap();
        assert_eq!(c.k_tilde[(2, 2)], 1.0);
        assert_eq!(c.k_tilde[(0, 0)], 500.0);
        let singular = Mat3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            CalibrationProfile::new(singular, Vec3::zeros(), 0.0),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn degenerate_points_are_flagged() {
        // Sends the line x = 1 to infinity.
        let h = Homography::new(Mat3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0)).unwrap();
        let out = predict_feature_positions(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 5.0)], &h);
        assert!(out[0].is_ok());
        assert_eq!(out[1], Err(Error::DegeneratePoint { index: 1 }));
    }
}
