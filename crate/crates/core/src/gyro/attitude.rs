use nalgebra::{Quaternion, UnitQuaternion};

use super::GyroStream;
use crate::math;
use crate::{Error, Mat3, Result, Vec3};

/// Largest rotation angle (radians) covered by one RK4 step.
const MAX_STEP_ANGLE: f64 = 0.01;

/// Unit quaternion rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    q: Quaternion<f64>,
}

impl Rotation {
    pub fn identity() -> Self {
        Self { q: Quaternion::identity() }
    }

    /// Normalizes `(w, x, y, z)`; fails on the zero quaternion.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let q = Quaternion::new(w, x, y, z);
        let n = q.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Data("zero or non-finite quaternion"));
        }
        Ok(Self { q: q / n })
    }

    /// Right-handed rotation by `angle` radians about `axis` (need not be unit).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 || angle == 0.0 {
            return Self::identity();
        }
        let (s, c) = (math::sin(0.5 * angle), math::cos(0.5 * angle));
        let u = axis / n;
        Self { q: Quaternion::new(c, s * u.x, s * u.y, s * u.z) }
    }

    /// Projects a near-orthogonal matrix onto the closest rotation.
    pub fn from_matrix(m: &Mat3) -> Self {
        let r = nalgebra::Rotation3::from_matrix(m);
        Self { q: *UnitQuaternion::from_rotation_matrix(&r).quaternion() }
    }

    /// `[w, x, y, z]`.
    pub fn quaternion(&self) -> [f64; 4] {
        [self.q.w, self.q.i, self.q.j, self.q.k]
    }

    pub fn matrix(&self) -> Mat3 {
        UnitQuaternion::new_unchecked(self.q).to_rotation_matrix().into_inner()
    }

    pub fn inverse(&self) -> Self {
        Self { q: self.q.conjugate() }
    }

    /// `self` followed by `then`, both expressed as body-frame increments.
    pub fn compose(&self, then: &Rotation) -> Self {
        Self { q: self.q * then.q }
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        UnitQuaternion::new_unchecked(self.q).angle()
    }
}

/// Attitude change of the gyro frame over `[t0, t1]`.
///
/// Integrates `dQ/dt = Q P / 2` with `P = (0, r)` from `Q = 1` using RK4.
/// Rates are held constant between samples (and before the first sample),
/// integration steps never straddle a sample time, and the quaternion is
/// renormalized after every step.
///
/// The returned rotation maps gyro-frame vectors at `t1` into the gyro frame
/// at `t0`. Its inverse maps a static point's coordinates at `t0` to its
/// coordinates at `t1`, which is the rotation that enters the inter-frame
/// homography.
pub fn integrate_rotation(stream: &GyroStream, t0: f64, t1: f64) -> Result<Rotation> {
    integrate_rotation_debiased(stream, Vec3::zeros(), t0, t1)
}

/// [`integrate_rotation`] with `bias` subtracted from every rate.
pub fn integrate_rotation_debiased(
    stream: &GyroStream,
    bias: Vec3,
    t0: f64,
    t1: f64,
) -> Result<Rotation> {
    if !(t1 > t0) {
        return Err(Error::Interval { t0, t1 });
    }
    if stream.is_empty() {
        return Err(Error::InsufficientData("empty gyro stream"));
    }
    let samples = stream.samples();
    let mut q = Quaternion::identity();
    let mut t = t0;
    let mut i = samples.partition_point(|s| s.t <= t0);
    while t < t1 {
        let seg_end = samples.get(i).map_or(t1, |s| s.t.min(t1));
        let rate = stream.rate_at(t) - bias;
        q = integrate_constant(q, rate, seg_end - t);
        t = seg_end;
        i += 1;
    }
    Ok(Rotation { q })
}

fn integrate_constant(mut q: Quaternion<f64>, rate: Vec3, duration: f64) -> Quaternion<f64> {
    if duration <= 0.0 {
        return q;
    }
    let steps = math::ceil(rate.norm() * duration / MAX_STEP_ANGLE).max(1.0) as usize;
    let h = duration / steps as f64;
    let p = Quaternion::new(0.0, rate.x, rate.y, rate.z);
    let f = |q: Quaternion<f64>| q * p * 0.5;
    for _ in 0..steps {
        let k1 = f(q);
        let k2 = f(q + k1 * (0.5 * h));
        let k3 = f(q + k2 * (0.5 * h));
        let k4 = f(q + k3 * h);
        q += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        q /= q.norm();
    }
    q
}
