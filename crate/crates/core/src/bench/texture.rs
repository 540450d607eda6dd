use crate::math;
use crate::Vec2;

/// Procedural intensity pattern over the scene plane. Each texture returns an
/// offset that is added to the scene's base intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Texture {
    /// Axis-aligned checkerboard with soft cell borders.
    Checkerboard { cell: f64, contrast: f64, softness: f64 },
    /// Parallel soft-edged stripes; `angle` is the direction across them.
    Stripes { period: f64, angle: f64, contrast: f64, softness: f64 },
    /// Straight step edge through `point`; `angle` is the direction of the
    /// bright side's normal.
    Edge { point: Vec2, angle: f64, contrast: f64, softness: f64 },
    /// Bright straight line of the given width through `point`; `angle` is
    /// the line's normal direction.
    Line { point: Vec2, angle: f64, width: f64, contrast: f64, softness: f64 },
    /// Linear ramp.
    Gradient { slope: Vec2 },
    /// Smoothly interpolated lattice noise.
    Noise { cell: f64, amplitude: f64, seed: u64 },
}

impl Texture {
    pub fn eval(&self, p: Vec2) -> f64 {
        match *self {
            Texture::Checkerboard { cell, contrast, softness } => {
                let s = softness.max(1e-6);
                let u = math::sin(core::f64::consts::PI * p.x / cell) * cell / (core::f64::consts::PI * s);
                let v = math::sin(core::f64::consts::PI * p.y / cell) * cell / (core::f64::consts::PI * s);
                0.5 * contrast * math::tanh(u) * math::tanh(v)
            }
            Texture::Stripes { period, angle, contrast, softness } => {
                let d = p.x * math::cos(angle) + p.y * math::sin(angle);
                let s = softness.max(1e-6);
                let u = math::sin(2.0 * core::f64::consts::PI * d / period) * period / (2.0 * core::f64::consts::PI * s);
                0.5 * contrast * math::tanh(u)
            }
            Texture::Edge { point, angle, contrast, softness } => {
                let d = signed_distance(p, point, angle);
                0.5 * contrast * math::tanh(d / softness.max(1e-6))
            }
            Texture::Line { point, angle, width, contrast, softness } => {
                let d = signed_distance(p, point, angle).abs() - 0.5 * width;
                0.5 * contrast * (1.0 - math::tanh(d / softness.max(1e-6)))
            }
            Texture::Gradient { slope } => slope.dot(&p),
            Texture::Noise { cell, amplitude, seed } => amplitude * value_noise(p / cell, seed),
        }
    }
}

fn signed_distance(p: Vec2, point: Vec2, angle: f64) -> f64 {
    (p.x - point.x) * math::cos(angle) + (p.y - point.y) * math::sin(angle)
}

fn lattice(ix: i64, iy: i64, seed: u64) -> f64 {
    let mut z = seed
        ^ (ix as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (iy as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    2.0 * ((z >> 11) as f64 / (1u64 << 53) as f64) - 1.0
}

/// Lattice values in [-1, 1] blended with a smoothstep.
fn value_noise(p: Vec2, seed: u64) -> f64 {
    let (fx, fy) = (math::floor(p.x), math::floor(p.y));
    let (ix, iy) = (fx as i64, fy as i64);
    let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
    let (u, v) = (smooth(p.x - fx), smooth(p.y - fy));
    let a = lattice(ix, iy, seed);
    let b = lattice(ix + 1, iy, seed);
    let c = lattice(ix, iy + 1, seed);
    let d = lattice(ix + 1, iy + 1, seed);
    (a + (b - a) * u) * (1.0 - v) + (c + (d - c) * u) * v
}

/// Small pattern carried by a feature, centred on the feature's plane
/// position and clipped to a square of half-size `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sprite {
    /// Four soft quadrants, bright in the first and third.
    Corner { radius: f64, contrast: f64, softness: f64 },
    /// Gaussian spot.
    Blob { radius: f64, contrast: f64 },
}

impl Sprite {
    pub fn radius(&self) -> f64 {
        match *self {
            Sprite::Corner { radius, .. } | Sprite::Blob { radius, .. } => radius,
        }
    }

    /// Intensity offset at `d` relative to the sprite centre, or `None` outside
    /// its footprint.
    pub fn eval(&self, d: Vec2) -> Option<f64> {
        let r = self.radius();
        if d.x.abs() > r || d.y.abs() > r {
            return None;
        }
        Some(match *self {
            Sprite::Corner { contrast, softness, .. } => {
                let s = softness.max(1e-6);
                0.5 * contrast * math::tanh(d.x / s) * math::tanh(d.y / s)
            }
            Sprite::Blob { radius, contrast } => {
                let s = radius / 3.0;
                contrast * math::exp(-d.norm_squared() / (2.0 * s * s))
            }
        })
    }
}
