use alloc::vec::Vec;

use super::{degrade_frame, DegradationProfile, GroundTruth, Sequence, Sprite, Texture, TruthTrack};
use crate::gyro::{gyro_homography, CalibrationProfile, GyroSample, GyroStream, Homography};
use crate::imaging::GrayFrame;
use crate::{math, Error, Result, Vec2, Vec3};

/// Gyro-frame rotation rate over camera time:
/// `constant + amplitude * sin(2 pi frequency t + phase)`, per axis, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionProfile {
    pub constant: Vec3,
    pub amplitude: Vec3,
    /// Hz.
    pub frequency: Vec3,
    pub phase: Vec3,
}

impl MotionProfile {
    pub fn still() -> Self {
        Self::constant(Vec3::zeros())
    }

    pub fn constant(rate: Vec3) -> Self {
        Self { constant: rate, amplitude: Vec3::zeros(), frequency: Vec3::zeros(), phase: Vec3::zeros() }
    }

    pub fn rate_at(&self, t: f64) -> Vec3 {
        let tau = 2.0 * core::f64::consts::PI;
        Vec3::from_fn(|i, _| {
            self.constant[i] + self.amplitude[i] * math::sin(tau * self.frequency[i] * t + self.phase[i])
        })
    }
}

impl Default for MotionProfile {
    fn default() -> Self {
        Self::still()
    }
}

/// A tracked point of the scene, given in frame-0 pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureSpec {
    pub position: Vec2,
    /// Translation of the feature over the scene plane per frame, which the
    /// gyro cannot observe. Needs a sprite to be visible.
    pub drift: Vec2,
    pub sprite: Option<Sprite>,
}

impl FeatureSpec {
    /// A point on the background texture.
    pub fn at(position: Vec2) -> Self {
        Self { position, drift: Vec2::zeros(), sprite: None }
    }
}

/// Description of a distant textured plane seen by a rotating camera.
///
/// The plane's coordinates are the pixel coordinates of frame 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub fps: f64,
    /// Background intensity before texture layers are added.
    pub base: f64,
    pub layers: Vec<Texture>,
    pub features: Vec<FeatureSpec>,
    pub motion: MotionProfile,
    /// Gyro samples per second.
    pub gyro_rate: f64,
    /// Gyro clock minus camera clock, seconds.
    pub latency: f64,
    /// Constant offset added to every emitted gyro sample.
    pub gyro_bias: Vec3,
    /// Seconds of stillness recorded before frame 0.
    pub lead_in: f64,
    /// A feature's ground truth ends once it comes this close to the border.
    pub margin: f64,
    pub degradation: Option<DegradationProfile>,
}

impl SceneSpec {
    pub fn new(width: usize, height: usize, frame_count: usize) -> Self {
        Self {
            width,
            height,
            frame_count,
            fps: 30.0,
            base: 128.0,
            layers: Vec::new(),
            features: Vec::new(),
            motion: MotionProfile::still(),
            gyro_rate: 400.0,
            latency: 0.0,
            gyro_bias: Vec3::zeros(),
            lead_in: 0.0,
            margin: 56.0,
            degradation: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Dimension { width: self.width, height: self.height, reason: "scene has no pixels" });
        }
        if self.frame_count == 0 {
            return Err(Error::Config("scene needs at least one frame"));
        }
        let positive = [self.fps, self.gyro_rate];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("frame and gyro rates must be positive"));
        }
        if !(self.lead_in >= 0.0 && self.margin >= 0.0 && self.latency.is_finite()) {
            return Err(Error::Config("lead-in and margin must be non-negative, latency finite"));
        }
        if self.features.iter().any(|f| f.sprite.is_none() && f.drift != Vec2::zeros()) {
            return Err(Error::Config("drifting features need a sprite"));
        }
        if let Some(d) = &self.degradation {
            d.validate()?;
        }
        Ok(())
    }
}

/// Rendered-on-demand sequence with its gyro stream and exact ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticSequence {
    spec: SceneSpec,
    calibration: CalibrationProfile,
    gyro: GyroStream,
    /// Frame-0 plane to frame k.
    chain: Vec<Homography>,
    truth: GroundTruth,
    exhausted_at: Option<u64>,
}

/// Synthesizes a sequence for `spec` seen through `camera`.
///
/// `camera.k_tilde` is used as is; its bias and latency are replaced by the
/// scene's, so [`SyntheticSequence::calibration`] is exactly what the gyro
/// trackers need. Frame-to-frame homographies are the gyro predictions
/// themselves, which makes the gyro flow exact apart from feature drift.
pub fn synth_sequence(spec: SceneSpec, camera: &CalibrationProfile) -> Result<SyntheticSequence> {
    spec.validate()?;
    let calibration = CalibrationProfile::new(camera.k_tilde, spec.gyro_bias, spec.latency)?;

    let duration = (spec.frame_count - 1) as f64 / spec.fps;
    let pad = 4.0 / spec.gyro_rate;
    let t0 = spec.latency - spec.lead_in - pad;
    let count = math::ceil((spec.lead_in + duration + 2.0 * pad) * spec.gyro_rate) as usize + 1;
    let samples = (0..count)
        .map(|i| {
            let t = t0 + i as f64 / spec.gyro_rate;
            let camera_time = t - spec.latency;
            let rate = if camera_time < 0.0 { Vec3::zeros() } else { spec.motion.rate_at(camera_time) };
            let r = rate + spec.gyro_bias;
            GyroSample::new(t, r.x, r.y, r.z)
        })
        .collect();
    let gyro = GyroStream::new(samples)?;

    let mut chain = Vec::with_capacity(spec.frame_count);
    chain.push(Homography::identity());
    for k in 1..spec.frame_count {
        let step = gyro_homography(&gyro, &calibration, frame_time(&spec, k - 1), frame_time(&spec, k))?;
        let prev = chain[k - 1];
        chain.push(step.after(&prev));
    }

    let (w, h) = ((spec.width - 1) as f64, (spec.height - 1) as f64);
    let inside = |p: Vec2| {
        p.x >= spec.margin && p.y >= spec.margin && p.x <= w - spec.margin && p.y <= h - spec.margin
    };
    let mut tracks = Vec::new();
    for (id, f) in spec.features.iter().enumerate() {
        let mut positions = Vec::new();
        for (k, hk) in chain.iter().enumerate() {
            match hk.apply(f.position + f.drift * k as f64) {
                Some(p) if inside(p) => positions.push(p),
                _ => break,
            }
        }
        if !positions.is_empty() {
            tracks.push(TruthTrack::new(id as u64, 0, positions)?);
        }
    }
    let truth = GroundTruth::new(tracks)?;
    let alive_until = truth.frame_count();
    let exhausted_at = (alive_until < spec.frame_count as u64).then_some(alive_until);

    Ok(SyntheticSequence { spec, calibration, gyro, chain, truth, exhausted_at })
}

fn frame_time(spec: &SceneSpec, k: usize) -> f64 {
    k as f64 / spec.fps
}

impl SyntheticSequence {
    pub fn spec(&self) -> &SceneSpec {
        &self.spec
    }

    /// Map from frame-0 pixel coordinates to frame `k`.
    pub fn plane_to_frame(&self, k: usize) -> &Homography {
        &self.chain[k]
    }

    /// First frame in which no feature is inside the trackable area, if the
    /// motion drives them all out before the sequence ends.
    pub fn exhausted_at(&self) -> Option<u64> {
        self.exhausted_at
    }

    /// Frame `k` before degradation.
    pub fn clean_frame(&self, k: usize) -> Result<GrayFrame> {
        if k >= self.spec.frame_count {
            return Err(Error::Config("frame index past the end of the scene"));
        }
        let spec = &self.spec;
        let back = self.chain[k].inverse();
        let m = back.matrix();
        let sprites: Vec<(Vec2, Sprite)> = spec
            .features
            .iter()
            .filter_map(|f| f.sprite.map(|s| (f.position + f.drift * k as f64, s)))
            .collect();
        let frame = GrayFrame::from_fn(spec.width, spec.height, |x, y| {
            let (x, y) = (x as f64, y as f64);
            let wq = m[(2, 0)] * x + m[(2, 1)] * y + m[(2, 2)];
            let q = Vec2::new(
                (m[(0, 0)] * x + m[(0, 1)] * y + m[(0, 2)]) / wq,
                (m[(1, 0)] * x + m[(1, 1)] * y + m[(1, 2)]) / wq,
            );
            let offset = sprites
                .iter()
                .find_map(|(c, s)| s.eval(q - c))
                .unwrap_or_else(|| spec.layers.iter().map(|t| t.eval(q)).sum());
            spec.base + offset
        });
        Ok(frame.with_time(k as u64, frame_time(spec, k)))
    }
}

impl Sequence for SyntheticSequence {
    fn len(&self) -> usize {
        self.spec.frame_count
    }

    fn frame(&self, k: usize) -> Result<GrayFrame> {
        let clean = self.clean_frame(k)?;
        match &self.spec.degradation {
            Some(p) => degrade_frame(&clean, p, k as u64),
            None => Ok(clean),
        }
    }

    fn gyro(&self) -> Option<&GyroStream> {
        Some(&self.gyro)
    }

    fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    fn calibration(&self) -> Option<&CalibrationProfile> {
        Some(&self.calibration)
    }
}
