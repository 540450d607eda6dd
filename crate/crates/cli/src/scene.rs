//! Procedural scene presets for `synth`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use gyroprior_core::bench::{DegradationProfile, FeatureSpec, MotionProfile, SceneSpec, Sprite, Texture};
use gyroprior_core::gyro::CalibrationProfile;
use gyroprior_core::{Vec2, Vec3};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    /// Soft checkerboard with a little noise; features on cell corners.
    Checker,
    /// Smooth value noise; features on a grid.
    Noise,
    /// Thin bright lines at six orientations; features sit on the lines and
    /// are ambiguous along them.
    Ridges,
    /// Corner sprites on a flat background that may slide across the scene.
    Corners,
}

impl SceneKind {
    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Checker => "checker",
            SceneKind::Noise => "noise",
            SceneKind::Ridges => "ridges",
            SceneKind::Corners => "corners",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [SceneKind::Checker, SceneKind::Noise, SceneKind::Ridges, SceneKind::Corners]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scene {s:?} (checker, noise, ridges, corners)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub kind: SceneKind,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    /// Focal length in pixels; the principal point is the image centre.
    pub focal: f64,
    /// Upper bound on the number of features.
    pub features: usize,
    /// Pan and tilt rate amplitude, rad/s.
    pub wobble: f64,
    /// Roll rate amplitude, rad/s.
    pub roll: f64,
    /// Constant rate added to the oscillation, rad/s.
    pub rate: [f64; 3],
    /// Gyro clock minus camera clock, seconds.
    pub latency: f64,
    pub gyro_bias: [f64; 3],
    pub gyro_rate: f64,
    /// Seconds of stillness recorded before the first frame.
    pub lead_in: f64,
    /// Per-frame sideways slide of `corners` sprites, alternating in sign.
    pub drift: f64,
    /// Degradation preset applied to rendered frames: none, low or high.
    pub degrade: String,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            kind: SceneKind::Checker,
            width: 640,
            height: 480,
            frames: 60,
            focal: 700.0,
            features: 20,
            wobble: 0.3,
            roll: 0.1,
            rate: [0.0; 3],
            latency: 0.0,
            gyro_bias: [0.0; 3],
            gyro_rate: 400.0,
            lead_in: 1.0,
            drift: 0.0,
            degrade: "none".into(),
        }
    }
}

/// Features stay this far from the border in frame 0.
const PLACEMENT_MARGIN: f64 = 100.0;

impl SceneConfig {
    pub fn camera(&self) -> Result<CalibrationProfile> {
        CalibrationProfile::pinhole(self.focal, (self.width as f64 - 1.0) / 2.0, (self.height as f64 - 1.0) / 2.0)
            .map_err(CliError::config)
    }

    pub fn degradation(&self, seed: u64) -> Result<Option<DegradationProfile>> {
        match self.degrade.as_str() {
            "none" => Ok(None),
            name => crate::profiles::degradation_preset(name, seed).map(Some),
        }
    }

    pub fn build(&self, fps: f64, seed: u64) -> Result<SceneSpec> {
        if self.width < 2 * PLACEMENT_MARGIN as usize || self.height < 2 * PLACEMENT_MARGIN as usize {
            return Err(CliError::config(format!("scene must be at least {0}x{0} pixels", 2 * PLACEMENT_MARGIN as usize)));
        }
        let mut s = SceneSpec::new(self.width, self.height, self.frames);
        s.fps = fps;
        s.motion = MotionProfile {
            constant: Vec3::from(self.rate),
            amplitude: Vec3::new(self.wobble, self.wobble, self.roll),
            frequency: Vec3::new(0.4, 0.3, 0.5),
            phase: Vec3::new(0.0, PI / 2.0, 0.3),
        };
        s.latency = self.latency;
        s.gyro_bias = Vec3::from(self.gyro_bias);
        s.gyro_rate = self.gyro_rate;
        s.lead_in = self.lead_in;
        s.degradation = self.degradation(seed)?;
        let (w, h) = (self.width as f64, self.height as f64);
        let inside = |p: &Vec2| {
            p.x >= PLACEMENT_MARGIN && p.x <= w - PLACEMENT_MARGIN && p.y >= PLACEMENT_MARGIN && p.y <= h - PLACEMENT_MARGIN
        };
        let candidates: Vec<FeatureSpec> = match self.kind {
            SceneKind::Checker => {
                let cell = 40.0;
                s.layers.push(Texture::Checkerboard { cell, contrast: 80.0, softness: 2.0 });
                s.layers.push(Texture::Noise { cell: 7.0, amplitude: 12.0, seed });
                lattice(cell, w, h).into_iter().filter(inside).map(FeatureSpec::at).collect()
            }
            SceneKind::Noise => {
                s.layers.push(Texture::Noise { cell: 6.0, amplitude: 60.0, seed });
                lattice(40.0, w, h).into_iter().filter(inside).map(FeatureSpec::at).collect()
            }
            SceneKind::Ridges => ridges(&mut s, inside),
            SceneKind::Corners => {
                let sprite = Some(Sprite::Corner { radius: 24.0, contrast: 100.0, softness: 1.5 });
                lattice(80.0, w, h)
                    .into_iter()
                    .filter(inside)
                    .enumerate()
                    .map(|(i, p)| {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        FeatureSpec { position: p, drift: Vec2::new(self.drift * sign, 0.0), sprite }
                    })
                    .collect()
            }
        };
        s.features = spread(candidates, self.features);
        Ok(s)
    }
}

fn lattice(step: f64, w: f64, h: f64) -> Vec<Vec2> {
    let mut out = Vec::new();
    let mut y = step;
    while y < h {
        let mut x = step;
        while x < w {
            out.push(Vec2::new(x, y));
            x += step;
        }
        y += step;
    }
    out
}

/// Keeps at most `n` items, evenly spaced through the list.
fn spread<T: Copy>(items: Vec<T>, n: usize) -> Vec<T> {
    if items.len() <= n {
        return items;
    }
    (0..n).map(|i| items[i * items.len() / n]).collect()
}

/// Six lines through the frame, given as a point and the normal's angle in
/// degrees, relative to a 640x480 frame and scaled to the actual size.
const RIDGES: [(f64, f64, f64); 6] = [
    (0.5, 0.3125, 10.0),
    (0.3125, 0.625, 55.0),
    (0.703, 0.6875, 100.0),
    (0.5, 0.5, 145.0),
    (0.234, 0.3125, 30.0),
    (0.781, 0.4167, 170.0),
];

fn ridges(s: &mut SceneSpec, inside: impl Fn(&Vec2) -> bool) -> Vec<FeatureSpec> {
    let lines: Vec<(Vec2, Vec2)> = RIDGES
        .iter()
        .map(|&(fx, fy, deg)| {
            let a = f64::to_radians(deg);
            (Vec2::new(fx * s.width as f64, fy * s.height as f64), Vec2::new(a.cos(), a.sin()))
        })
        .collect();
    for &(point, n) in &lines {
        s.layers.push(Texture::Line { point, angle: n.y.atan2(n.x), width: 6.0, contrast: 80.0, softness: 1.5 });
    }
    let mut out = Vec::new();
    for &(point, n) in &lines {
        let along = Vec2::new(-n.y, n.x);
        for j in -6..=6 {
            // Just off the centre line, where the line's profile has slope.
            let p = point + along * (j as f64 * 40.0) + n * 3.0;
            let near = lines.iter().filter(|(q, m)| (p - q).dot(m).abs() < 30.0).count();
            if near == 1 && inside(&p) {
                out.push(FeatureSpec::at(p));
            }
        }
    }
    out
}
