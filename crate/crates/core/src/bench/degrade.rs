use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::imaging::{gaussian_blur, GrayFrame};
use crate::{Error, Result};

/// ChaCha words reserved per pixel. A normal draw usually takes two; rare
/// rejection retries may spill into the next pixel's words, which is harmless
/// because every pixel seeks to its own start.
const WORDS_PER_PIXEL: u128 = 4;
/// Forward gaps shorter than this are skipped by reading instead of seeking,
/// which would regenerate the whole block buffer.
const MAX_SKIP: u128 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationProfile {
    /// Intensity multiplier.
    pub m: f64,
    pub mu1: f64,
    pub sigma1: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub mu2: f64,
    pub sigma2: f64,
    pub seed: u64,
}

impl DegradationProfile {
    pub fn low(seed: u64) -> Self {
        Self { m: 0.9, mu1: 0.0, sigma1: 15.0, sigma_x: 1.5, sigma_y: 1.5, mu2: 0.0, sigma2: 1.5, seed }
    }

    pub fn high(seed: u64) -> Self {
        Self { m: 0.8, mu1: 0.0, sigma1: 30.0, sigma_x: 3.0, sigma_y: 3.0, mu2: 0.0, sigma2: 3.0, seed }
    }

    /// Leaves frames unchanged apart from clamping to `[0, 255]`.
    pub fn identity() -> Self {
        Self { m: 1.0, mu1: 0.0, sigma1: 0.0, sigma_x: 0.0, sigma_y: 0.0, mu2: 0.0, sigma2: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.m, self.mu1, self.sigma1, self.sigma_x, self.sigma_y, self.mu2, self.sigma2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("degradation parameters must be finite"));
        }
        if self.m <= 0.0 {
            return Err(Error::Config("intensity multiplier m must be positive"));
        }
        if [self.sigma1, self.sigma_x, self.sigma_y, self.sigma2].iter().any(|&s| s < 0.0) {
            return Err(Error::Config("degradation sigmas must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NoiseStage {
    BeforeBlur = 1,
    AfterBlur = 2,
}

/// Standard-normal noise field keyed by `(seed, frame, stage)`; the value at
/// pixel `i` depends only on the key and `i`.
pub(crate) struct NoiseField {
    rng: ChaCha8Rng,
}

impl NoiseField {
    pub(crate) fn new(seed: u64, frame_index: u64, stage: NoiseStage) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&frame_index.to_le_bytes());
        key[16..24].copy_from_slice(&(stage as u64).to_le_bytes());
        Self { rng: ChaCha8Rng::from_seed(key) }
    }

    pub(crate) fn at(&mut self, pixel: usize) -> f64 {
        self.seek(pixel as u128 * WORDS_PER_PIXEL);
        StandardNormal.sample(&mut self.rng)
    }

    fn seek(&mut self, target: u128) {
        let pos = self.rng.get_word_pos();
        if pos <= target && target - pos < MAX_SKIP {
            for _ in pos..target {
                self.rng.next_u32();
            }
        } else {
            self.rng.set_word_pos(target);
        }
    }

    #[cfg(test)]
    fn raw(&mut self, pixel: usize) -> u64 {
        self.rng.set_word_pos(pixel as u128 * WORDS_PER_PIXEL);
        self.rng.next_u64()
    }
}

fn clamp_255(v: f64) -> f64 {
    v.clamp(0.0, 255.0)
}

/// Applies the degradation pipeline to one frame:
/// scale by `m`, add noise, clamp, blur, add noise again, clamp.
///
/// Noise is keyed by `(p.seed, frame_index, pixel)`, so the output is
/// reproducible and does not depend on evaluation order.
pub fn degrade_frame(frame: &GrayFrame, p: &DegradationProfile, frame_index: u64) -> Result<GrayFrame> {
    p.validate()?;
    let mut first = NoiseField::new(p.seed, frame_index, NoiseStage::BeforeBlur);
    let mut i = 0;
    let stage1 = frame.map(|v| {
        let n = if p.sigma1 > 0.0 { p.sigma1 * first.at(i) } else { 0.0 };
        i += 1;
        clamp_255(p.m * v + p.mu1 + n)
    });
    let blurred = gaussian_blur(&stage1, p.sigma_x, p.sigma_y);
    let mut second = NoiseField::new(p.seed, frame_index, NoiseStage::AfterBlur);
    let mut i = 0;
    let out = blurred.map(|v| {
        let n = if p.sigma2 > 0.0 { p.sigma2 * second.at(i) } else { 0.0 };
        i += 1;
        clamp_255(v + p.mu2 + n)
    });
    Ok(out.with_time(frame.frame_index, frame.timestamp))
}
