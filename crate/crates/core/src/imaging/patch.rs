use alloc::vec::Vec;

use super::grid::for_each_grid_sample;
use super::GrayFrame;
use crate::{Error, Result, Vec2};

/// Square `n x n` template, `n` odd, sampled around a subpixel centre.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    size: usize,
    values: Vec<f64>,
    center: Vec2,
}

impl Patch {
    /// Wraps row-major values. `size` must be odd and match the buffer.
    pub fn new(size: usize, values: Vec<f64>, center: Vec2) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::Config("template size must be odd"));
        }
        if values.len() != size * size {
            return Err(Error::Data("patch buffer does not match its size"));
        }
        Ok(Self { size, values, center })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Offset from the centre to the outermost sample, `(n - 1) / 2`.
    pub fn half(&self) -> usize {
        (self.size - 1) / 2
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    /// Value at `row` `i`, column `j`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }
}

/// Samples an `n x n` grid at `center + (j - (n-1)/2, i - (n-1)/2)`.
pub fn extract_patch(frame: &GrayFrame, center: Vec2, n: usize) -> Result<Patch> {
    if n.is_multiple_of(2) {
        return Err(Error::Config("template size must be odd"));
    }
    let half = (n - 1) / 2;
    if !frame.grid_in_bounds(center, half as f64) {
        return Err(Error::Boundary { feature: None });
    }
    let mut values = alloc::vec![0.0; n * n];
    for_each_grid_sample(frame, center, half, |k, v| values[k] = v);
    Ok(Patch { size: n, values, center })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_gives_constant_patch() {
        let f = GrayFrame::filled(30, 30, 50.0);
        let p = extract_patch(&f, Vec2::new(10.0, 12.0), 5).unwrap();
        assert!(p.values().iter().all(|&v| v == 50.0));
        assert_eq!(p.values().len(), 25);
    }

    #[test]
    fn lone_bright_pixel_lands_in_centre() {
        let f = GrayFrame::from_fn(9, 9, |x, y| if (x, y) == (4, 5) { 255.0 } else { 0.0 });
        let p = extract_patch(&f, Vec2::new(4.0, 5.0), 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if (i, j) == (1, 1) { 255.0 } else { 0.0 };
                assert_eq!(p.value(i, j), expect);
            }
        }
    }

    #[test]
    fn grid_matches_pointwise_bilinear() {
        let f = GrayFrame::from_fn(40, 40, |x, y| ((x * 37 + y * y * 11) % 200) as f64);
        let c = Vec2::new(18.37, 21.81);
        let p = extract_patch(&f, c, 7).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let q = c + Vec2::new(j as f64 - 3.0, i as f64 - 3.0);
                assert!((p.value(i, j) - f.sample(q).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extraction_is_deterministic() {
        let f = GrayFrame::from_fn(40, 40, |x, y| ((x * x + 3 * y) % 50) as f64);
        let c = Vec2::new(17.3, 20.8);
        assert_eq!(extract_patch(&f, c, 13).unwrap(), extract_patch(&f, c, 13).unwrap());
    }

    #[test]
    fn boundary_and_parity_errors() {
        let f = GrayFrame::filled(20, 20, 1.0);
        assert_eq!(extract_patch(&f, Vec2::new(2.5, 10.0), 7), Err(Error::Boundary { feature: None }));
        assert!(extract_patch(&f, Vec2::new(3.0, 10.0), 7).is_ok());
        assert!(matches!(extract_patch(&f, Vec2::new(10.0, 10.0), 4), Err(Error::Config(_))));
    }
}
