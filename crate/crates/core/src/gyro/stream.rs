use alloc::vec::Vec;

use crate::{Error, Result, Vec3};

/// Minimum number of stationary samples accepted by [`estimate_bias`].
pub const MIN_BIAS_SAMPLES: usize = 10;

/// One gyro reading: rotation rates about the gyro X, Y and Z axes in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroSample {
    pub t: f64,
    pub rate: Vec3,
}

impl GyroSample {
    pub fn new(t: f64, rx: f64, ry: f64, rz: f64) -> Self {
        Self { t, rate: Vec3::new(rx, ry, rz) }
    }
}

/// Time-ordered gyro samples with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GyroStream {
    samples: Vec<GyroSample>,
}

impl GyroStream {
    pub fn new(samples: Vec<GyroSample>) -> Result<Self> {
        for s in &samples {
            if !s.t.is_finite() || !s.rate.iter().all(|v| v.is_finite()) {
                return Err(Error::Data("non-finite gyro sample"));
            }
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Data("gyro timestamps must be strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[GyroSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(first, last)` timestamps, if any.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.t, self.samples.last()?.t))
    }

    /// Rate held from the most recent sample at or before `t` (the first
    /// sample before the stream starts).
    pub(crate) fn rate_at(&self, t: f64) -> Vec3 {
        let i = self.samples.partition_point(|s| s.t <= t);
        self.samples[i.saturating_sub(1)].rate
    }

    /// Mean of `|r|` over `[a, b]` under sample-and-hold.
    pub(crate) fn mean_magnitude(&self, a: f64, b: f64) -> f64 {
        debug_assert!(b > a);
        let mut t = a;
        let mut acc = 0.0;
        let mut i = self.samples.partition_point(|s| s.t <= a);
        while t < b {
            let next = self.samples.get(i).map_or(b, |s| s.t.min(b));
            acc += self.rate_at(t).norm() * (next - t);
            t = next;
            i += 1;
        }
        acc / (b - a)
    }
}

/// Per-axis mean of the samples with `t_start <= t <= t_end`, taken while the
/// sensor is stationary.
pub fn estimate_bias(stream: &GyroStream, t_start: f64, t_end: f64) -> Result<Vec3> {
    let mut sum = Vec3::zeros();
    let mut count = 0usize;
    for s in stream.samples.iter().filter(|s| s.t >= t_start && s.t <= t_end) {
        sum += s.rate;
        count += 1;
    }
    if count < MIN_BIAS_SAMPLES {
        return Err(Error::InsufficientData("bias window needs at least 10 samples"));
    }
    Ok(sum / count as f64)
}

/// Subtracts `bias` from every sample.
pub fn debias(stream: &GyroStream, bias: Vec3) -> GyroStream {
    GyroStream {
        samples: stream
            .samples
            .iter()
            .map(|s| GyroSample { t: s.t, rate: s.rate - bias })
            .collect(),
    }
}

/// Rotation-rate magnitude statistics in degrees per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSummary {
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

pub fn rotation_rate_summary(stream: &GyroStream) -> Result<RateSummary> {
    if stream.is_empty() {
        return Err(Error::InsufficientData("empty gyro stream"));
    }
    let mut mags: Vec<f64> = stream.samples.iter().map(|s| s.rate.norm().to_degrees()).collect();
    mags.sort_by(f64::total_cmp);
    let n = mags.len();
    let median = if n % 2 == 1 { mags[n / 2] } else { 0.5 * (mags[n / 2 - 1] + mags[n / 2]) };
    Ok(RateSummary {
        max: mags[n - 1],
        mean: mags.iter().sum::<f64>() / n as f64,
        median,
    })
}
