use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result, Vec2};

/// Single-channel image with real-valued intensities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    data: Vec<f64>,
    /// Ordinal of the frame within its sequence.
    pub frame_index: u64,
    /// Capture time in seconds (camera clock).
    pub timestamp: f64,
}

impl GrayFrame {
    /// Wraps row-major intensities. Fails if the buffer length does not match
    /// or any intensity is not finite.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension { width, height, reason: "empty frame" });
        }
        if data.len() != width * height {
            return Err(Error::Dimension {
                width,
                height,
                reason: "buffer length does not match dimensions",
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite intensity"));
        }
        Ok(Self { width, height, data, frame_index: 0, timestamp: 0.0 })
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    ///
    /// # Panics
    /// If a dimension is zero or `f` returns a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "empty frame");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(v.is_finite(), "non-finite intensity at ({x}, {y})");
                data.push(v);
            }
        }
        Self { width, height, data, frame_index: 0, timestamp: 0.0 }
    }

    /// Constant-intensity frame.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "empty frame");
        assert!(value.is_finite());
        Self { width, height, data: vec![value; width * height], frame_index: 0, timestamp: 0.0 }
    }

    /// Sets the sequence ordinal and timestamp.
    pub fn with_time(mut self, frame_index: u64, timestamp: f64) -> Self {
        self.frame_index = frame_index;
        self.timestamp = timestamp;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Whether `p` lies in `[0, w-1] x [0, h-1]`.
    #[inline]
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= 0.0
            && p.y >= 0.0
            && p.x <= (self.width - 1) as f64
            && p.y <= (self.height - 1) as f64
    }

    /// Whether the square grid of half-width `half` centred on `center` lies
    /// inside the frame.
    #[inline]
    pub(crate) fn grid_in_bounds(&self, center: Vec2, half: f64) -> bool {
        center.x - half >= 0.0
            && center.y - half >= 0.0
            && center.x + half <= (self.width - 1) as f64
            && center.y + half <= (self.height - 1) as f64
    }

    /// Bilinear sample; see [`sample_bilinear`].
    pub fn sample(&self, p: Vec2) -> Result<f64> {
        sample_bilinear(self, p)
    }

    /// Bilinear sample at `(x, y)`; the caller guarantees the point is inside.
    #[inline]
    pub(crate) fn sample_unchecked(&self, x: f64, y: f64) -> f64 {
        let xf = math::floor(x);
        let yf = math::floor(y);
        let x0 = xf as usize;
        let y0 = yf as usize;
        let fx = x - xf;
        let fy = y - yf;
        let x1 = if x0 + 1 < self.width { x0 + 1 } else { x0 };
        let y1 = if y0 + 1 < self.height { y0 + 1 } else { y0 };
        let r0 = y0 * self.width;
        let r1 = y1 * self.width;
        let p00 = self.data[r0 + x0];
        let p10 = self.data[r0 + x1];
        let p01 = self.data[r1 + x0];
        let p11 = self.data[r1 + x1];
        (1.0 - fx) * (1.0 - fy) * p00 + fx * (1.0 - fy) * p10 + (1.0 - fx) * fy * p01 + fx * fy * p11
    }

    /// Population variance of all intensities.
    pub fn variance(&self) -> f64 {
        let n = self.data.len() as f64;
        let mean = self.data.iter().sum::<f64>() / n;
        self.data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
    }

    /// Applies `f` to every intensity.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
            frame_index: self.frame_index,
            timestamp: self.timestamp,
        }
    }
}

/// Bilinear interpolation of the four pixels around `p`. Exact at integer
/// coordinates and for affine intensity functions.
pub fn sample_bilinear(frame: &GrayFrame, p: Vec2) -> Result<f64> {
    if !frame.contains(p) {
        return Err(Error::OutOfBounds { x: p.x, y: p.y, width: frame.width, height: frame.height });
    }
    Ok(frame.sample_unchecked(p.x, p.y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> GrayFrame {
        GrayFrame::from_fn(32, 24, |x, _| x as f64)
    }

    #[test]
    fn rejects_bad_buffers() {
        assert!(GrayFrame::new(4, 4, vec![0.0; 15]).is_err());
        assert!(GrayFrame::new(2, 1, vec![0.0, f64::NAN]).is_err());
        assert!(GrayFrame::new(2, 1, vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn integer_coordinates_are_exact() {
        let f = GrayFrame::from_fn(40, 30, |x, y| ((x * 7 + y * 13) % 256) as f64);
        assert_eq!(f.sample(Vec2::new(10.0, 20.0)).unwrap(), f.pixel(10, 20));
        assert_eq!(f.sample(Vec2::new(39.0, 29.0)).unwrap(), f.pixel(39, 29));
    }

    #[test]
    fn midpoint_is_average() {
        let mut data = vec![0.0; 4];
        data[1] = 100.0;
        data[3] = 100.0;
        let f = GrayFrame::new(2, 2, data).unwrap();
        assert_eq!(f.sample(Vec2::new(0.5, 0.0)).unwrap(), 50.0);
    }

    #[test]
    fn reproduces_linear_ramp() {
        let f = ramp();
        let v = f.sample(Vec2::new(7.25, 3.0)).unwrap();
        assert!((v - 7.25).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_is_an_error() {
        let f = ramp();
        assert!(matches!(f.sample(Vec2::new(-0.01, 2.0)), Err(Error::OutOfBounds { .. })));
        assert!(f.sample(Vec2::new(31.0001, 2.0)).is_err());
        assert!(f.sample(Vec2::new(3.0, 23.5)).is_err());
    }
}
