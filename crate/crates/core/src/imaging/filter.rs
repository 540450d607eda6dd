use alloc::vec;
use alloc::vec::Vec;

use super::GrayFrame;
use crate::math;

/// Normalized 1D Gaussian kernel with radius `ceil(3 sigma)`.
/// A non-positive sigma yields the identity kernel `[1.0]`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = math::ceil(3.0 * sigma) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| math::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Separable Gaussian blur, horizontal pass first, edges replicated.
pub fn gaussian_blur(frame: &GrayFrame, sigma_x: f64, sigma_y: f64) -> GrayFrame {
    let w = frame.width();
    let h = frame.height();
    let kx = gaussian_kernel(sigma_x);
    let ky = gaussian_kernel(sigma_y);
    let rx = (kx.len() / 2) as isize;
    let ry = (ky.len() / 2) as isize;
    let src = frame.data();

    let mut tmp = vec![0.0; w * h];
    if kx.len() == 1 {
        tmp.copy_from_slice(src);
    } else {
        for y in 0..h {
            let row = &src[y * w..(y + 1) * w];
            for x in 0..w {
                let mut acc = 0.0;
                for (i, wt) in kx.iter().enumerate() {
                    let sx = (x as isize + i as isize - rx).clamp(0, w as isize - 1) as usize;
                    acc += wt * row[sx];
                }
                tmp[y * w + x] = acc;
            }
        }
    }

    let mut out = vec![0.0; w * h];
    if ky.len() == 1 {
        out.copy_from_slice(&tmp);
    } else {
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (i, wt) in ky.iter().enumerate() {
                    let sy = (y as isize + i as isize - ry).clamp(0, h as isize - 1) as usize;
                    acc += wt * tmp[sy * w + x];
                }
                out[y * w + x] = acc;
            }
        }
    }

    GrayFrame::new(w, h, out)
        .expect("blur preserves dimensions and finiteness")
        .with_time(frame.frame_index, frame.timestamp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized_with_three_sigma_radius() {
        let k = gaussian_kernel(1.0);
        assert_eq!(k.len(), 7);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let k = gaussian_kernel(1.5);
        assert_eq!(k.len(), 2 * 5 + 1);
        assert_eq!(gaussian_kernel(0.0), vec![1.0]);
    }

    #[test]
    fn zero_sigma_is_identity() {
        let f = GrayFrame::from_fn(9, 7, |x, y| (x * y) as f64);
        assert_eq!(gaussian_blur(&f, 0.0, 0.0).data(), f.data());
    }

    #[test]
    fn blur_keeps_constants() {
        let f = GrayFrame::filled(20, 10, 77.0);
        let b = gaussian_blur(&f, 2.0, 0.5);
        assert!(b.data().iter().all(|v| (v - 77.0).abs() < 1e-12));
    }
}
