//! Synthetic scenes shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use gyroprior_core::bench::{
    synth_sequence, DegradationProfile, FeatureSpec, MotionProfile, SceneSpec, Sprite, SyntheticSequence, Texture,
};
use gyroprior_core::gyro::CalibrationProfile;
use gyroprior_core::{Vec2, Vec3};

pub const WIDTH: usize = 640;
pub const HEIGHT: usize = 480;

pub fn camera() -> CalibrationProfile {
    CalibrationProfile::pinhole(700.0, WIDTH as f64 / 2.0, HEIGHT as f64 / 2.0).unwrap()
}

/// Oscillating pan, tilt and a little roll.
pub fn wobble(amplitude: f64, roll: f64) -> MotionProfile {
    MotionProfile {
        constant: Vec3::zeros(),
        amplitude: Vec3::new(amplitude, amplitude, roll),
        frequency: Vec3::new(0.4, 0.3, 0.5),
        phase: Vec3::new(0.0, PI / 2.0, 0.3),
    }
}

struct Ridge {
    point: Vec2,
    degrees: f64,
}

impl Ridge {
    fn normal(&self) -> Vec2 {
        let a = self.degrees.to_radians();
        Vec2::new(a.cos(), a.sin())
    }
}

const RIDGES: [Ridge; 6] = [
    Ridge { point: Vec2::new(320.0, 150.0), degrees: 10.0 },
    Ridge { point: Vec2::new(200.0, 300.0), degrees: 55.0 },
    Ridge { point: Vec2::new(450.0, 330.0), degrees: 100.0 },
    Ridge { point: Vec2::new(320.0, 240.0), degrees: 145.0 },
    Ridge { point: Vec2::new(150.0, 150.0), degrees: 30.0 },
    Ridge { point: Vec2::new(500.0, 200.0), degrees: 170.0 },
];

/// Long straight bright lines at six orientations with features on the
/// lines, at least 30 px from any other line.
pub fn ridge_scene(frames: usize, degradation: Option<DegradationProfile>) -> SceneSpec {
    let mut s = SceneSpec::new(WIDTH, HEIGHT, frames);
    for r in &RIDGES {
        s.layers.push(Texture::Line {
            point: r.point,
            angle: r.degrees.to_radians(),
            width: 6.0,
            contrast: 80.0,
            softness: 1.5,
        });
    }
    for r in &RIDGES {
        let n = r.normal();
        let along = Vec2::new(-n.y, n.x);
        for j in -4..=4 {
            let p = r.point + along * (j as f64 * 40.0) + n * 3.0;
            let crossings = RIDGES.iter().filter(|o| (p - o.point).dot(&o.normal()).abs() < 30.0).count();
            let inside = p.x > 90.0 && p.x < WIDTH as f64 - 90.0 && p.y > 90.0 && p.y < HEIGHT as f64 - 90.0;
            if crossings == 1 && inside {
                s.features.push(FeatureSpec::at(p));
            }
        }
    }
    s.motion = wobble(0.3, 0.1);
    s.degradation = degradation;
    s
}

pub fn ridges(frames: usize, degradation: Option<DegradationProfile>) -> SyntheticSequence {
    synth_sequence(ridge_scene(frames, degradation), &camera()).unwrap()
}

/// Five corner sprites on a flat background, each sliding across the scene
/// by `drift` per frame while the camera pans.
pub fn drifting_corners(frames: usize, drift: Vec2) -> SyntheticSequence {
    let mut s = SceneSpec::new(WIDTH, HEIGHT, frames);
    let sprite = Some(Sprite::Corner { radius: 24.0, contrast: 100.0, softness: 1.5 });
    for (i, p) in [(220.0, 170.0), (420.0, 170.0), (320.0, 240.0), (230.0, 300.0), (420.0, 300.0)]
        .into_iter()
        .enumerate()
    {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s.features.push(FeatureSpec { position: Vec2::new(p.0, p.1), drift: drift * sign, sprite });
    }
    s.motion = wobble(0.15, 0.05);
    synth_sequence(s, &camera()).unwrap()
}
