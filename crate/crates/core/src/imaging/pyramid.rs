use alloc::vec::Vec;

use super::{gaussian_blur, GrayFrame};
use crate::{Error, Result};

/// Number of pyramid levels used by the coarse-to-fine trackers.
pub const PYRAMID_LEVELS: usize = 4;

const PREFILTER_SIGMA: f64 = 1.0;
const MIN_SIZE: usize = 8 << (PYRAMID_LEVELS - 1);

/// Four-level image pyramid; level 0 is full resolution and each following
/// level halves both dimensions (rounding up).
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    levels: Vec<GrayFrame>,
}

impl Pyramid {
    pub fn level(&self, k: usize) -> &GrayFrame {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[GrayFrame] {
        &self.levels
    }

    pub fn base(&self) -> &GrayFrame {
        &self.levels[0]
    }

    /// Full-resolution pixels per level-`k` pixel.
    pub fn scale(k: usize) -> f64 {
        (1u32 << k) as f64
    }
}

/// Blurs with a σ = 1 Gaussian and decimates by two, three times.
pub fn build_pyramid(frame: &GrayFrame) -> Result<Pyramid> {
    if frame.width() < MIN_SIZE || frame.height() < MIN_SIZE {
        return Err(Error::Dimension {
            width: frame.width(),
            height: frame.height(),
            reason: "pyramid needs at least 64 pixels per side",
        });
    }
    let mut levels = Vec::with_capacity(PYRAMID_LEVELS);
    levels.push(frame.clone());
    for k in 1..PYRAMID_LEVELS {
        let blurred = gaussian_blur(&levels[k - 1], PREFILTER_SIGMA, PREFILTER_SIGMA);
        levels.push(decimate(&blurred));
    }
    Ok(Pyramid { levels })
}

fn decimate(frame: &GrayFrame) -> GrayFrame {
    let w = frame.width().div_ceil(2);
    let h = frame.height().div_ceil(2);
    GrayFrame::from_fn(w, h, |x, y| frame.pixel(2 * x, 2 * y))
        .with_time(frame.frame_index, frame.timestamp)
}
