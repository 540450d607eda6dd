use super::GrayFrame;
use crate::math;
use crate::Vec2;

/// Visits the `(2 half + 1)^2` bilinear samples of a square grid centred on
/// `center`, row by row. All samples share the same interpolation weights, so
/// they are computed once. The caller checks bounds.
#[inline]
pub(crate) fn for_each_grid_sample(
    frame: &GrayFrame,
    center: Vec2,
    half: usize,
    mut visit: impl FnMut(usize, f64),
) {
    let n = 2 * half + 1;
    let ox = center.x - half as f64;
    let oy = center.y - half as f64;
    let xf = math::floor(ox);
    let yf = math::floor(oy);
    let fx = ox - xf;
    let fy = oy - yf;
    let (x0, y0) = (xf as usize, yf as usize);
    let w = frame.width();
    let h = frame.height();
    let data = frame.data();
    let w00 = (1.0 - fx) * (1.0 - fy);
    let w10 = fx * (1.0 - fy);
    let w01 = (1.0 - fx) * fy;
    let w11 = fx * fy;
    for i in 0..n {
        let r0 = (y0 + i) * w;
        let r1 = (y0 + i + 1).min(h - 1) * w;
        for j in 0..n {
            let c0 = x0 + j;
            let c1 = (c0 + 1).min(w - 1);
            let v = w00 * data[r0 + c0] + w10 * data[r0 + c1] + w01 * data[r1 + c0] + w11 * data[r1 + c1];
            visit(i * n + j, v);
        }
    }
}
