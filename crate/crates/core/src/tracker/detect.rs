use alloc::vec::Vec;

use crate::imaging::GrayFrame;
use crate::math;
use crate::Vec2;

/// Candidates weaker than this fraction of the strongest response are ignored.
const QUALITY_LEVEL: f64 = 0.01;

/// Smaller eigenvalue of the 3x3-summed gradient covariance at every pixel;
/// zero on the two-pixel border.
pub fn min_eigenvalue_map(frame: &GrayFrame) -> Vec<f64> {
    let w = frame.width();
    let h = frame.height();
    let mut gxx = alloc::vec![0.0; w * h];
    let mut gxy = alloc::vec![0.0; w * h];
    let mut gyy = alloc::vec![0.0; w * h];
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            let ix = 0.5 * (frame.pixel(x + 1, y) - frame.pixel(x - 1, y));
            let iy = 0.5 * (frame.pixel(x, y + 1) - frame.pixel(x, y - 1));
            let k = y * w + x;
            gxx[k] = ix * ix;
            gxy[k] = ix * iy;
            gyy[k] = iy * iy;
        }
    }
    let mut out = alloc::vec![0.0; w * h];
    for y in 2..h.saturating_sub(2) {
        for x in 2..w.saturating_sub(2) {
            let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
            for yy in y - 1..=y + 1 {
                for xx in x - 1..=x + 1 {
                    let k = yy * w + xx;
                    a += gxx[k];
                    b += gxy[k];
                    c += gyy[k];
                }
            }
            let half_diff = 0.5 * (a - c);
            out[y * w + x] = 0.5 * (a + c) - math::sqrt(half_diff * half_diff + b * b);
        }
    }
    out
}

/// Corner-like points: local maxima of the minimum-eigenvalue response,
/// strongest first, greedily suppressed so that no two are closer than
/// `min_spacing` pixels.
pub fn detect_features(frame: &GrayFrame, max_count: usize, min_spacing: f64) -> Vec<Vec2> {
    let w = frame.width();
    let h = frame.height();
    let score = min_eigenvalue_map(frame);
    let strongest = score.iter().copied().fold(0.0, f64::max);
    if strongest <= 1e-9 {
        return Vec::new();
    }
    let floor = QUALITY_LEVEL * strongest;
    let mut candidates = Vec::new();
    for y in 2..h.saturating_sub(2) {
        for x in 2..w.saturating_sub(2) {
            let s = score[y * w + x];
            if s < floor || s <= 0.0 {
                continue;
            }
            let is_max = (y - 1..=y + 1)
                .all(|yy| (x - 1..=x + 1).all(|xx| score[yy * w + xx] <= s));
            if is_max {
                candidates.push((s, y, x));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut accepted: Vec<Vec2> = Vec::new();
    let spacing2 = min_spacing * min_spacing;
    for (_, y, x) in candidates {
        if accepted.len() >= max_count {
            break;
        }
        let p = Vec2::new(x as f64, y as f64);
        if accepted.iter().all(|q| (p - q).norm_squared() >= spacing2) {
            accepted.push(p);
        }
    }
    accepted
}
