use super::{Pyramid, GrayFrame};
use crate::{Error, Result, Vec2};

/// Pyramid level searched by [`register_coarse`] (quarter resolution).
pub const REGISTRATION_LEVEL: usize = 2;
/// Default search radius in level-2 pixels.
pub const DEFAULT_SEARCH_RADIUS: usize = 20;

/// Global integer displacement from `prev` to `cur`, found by exhaustive
/// search at quarter resolution and returned in full-resolution pixels.
///
/// The cost of a shift `d` is the mean absolute difference between
/// `cur(x + d)` and `prev(x)` over the overlap. Equal costs prefer the
/// smaller displacement, then the lexicographically smaller one.
pub fn register_coarse(prev: &Pyramid, cur: &Pyramid, search_radius: usize) -> Result<Vec2> {
    let a = prev.level(REGISTRATION_LEVEL);
    let b = cur.level(REGISTRATION_LEVEL);
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::Dimension {
            width: b.width(),
            height: b.height(),
            reason: "registration needs frames of equal size",
        });
    }
    let r = search_radius as isize;
    let mut best: Option<(f64, isize, isize, isize)> = None;
    for dy in -r..=r {
        for dx in -r..=r {
            let Some(cost) = shift_cost(a, b, dx, dy) else { continue };
            let key = (cost, dx * dx + dy * dy, dx, dy);
            let better = match best {
                None => true,
                Some(cur) => {
                    key.0 < cur.0
                        || (key.0 == cur.0 && (key.1, key.2, key.3) < (cur.1, cur.2, cur.3))
                }
            };
            if better {
                best = Some(key);
            }
        }
    }
    let (_, _, dx, dy) = best.unwrap_or((0.0, 0, 0, 0));
    let s = Pyramid::scale(REGISTRATION_LEVEL);
    Ok(Vec2::new(dx as f64 * s, dy as f64 * s))
}

fn shift_cost(prev: &GrayFrame, cur: &GrayFrame, dx: isize, dy: isize) -> Option<f64> {
    let w = prev.width() as isize;
    let h = prev.height() as isize;
    let x0 = 0.max(-dx);
    let x1 = w.min(w - dx);
    let y0 = 0.max(-dy);
    let y1 = h.min(h - dy);
    if x0 >= x1 || y0 >= y1 {
        return None;
    }
    let mut sum = 0.0;
    for y in y0..y1 {
        let pr = &prev.row(y as usize)[x0 as usize..x1 as usize];
        let cr = &cur.row((y + dy) as usize)[(x0 + dx) as usize..(x1 + dx) as usize];
        sum += pr.iter().zip(cr).map(|(p, c)| (c - p).abs()).sum::<f64>();
    }
    Some(sum / ((x1 - x0) * (y1 - y0)) as f64)
}
