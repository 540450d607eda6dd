//! Annotated frames: tracked positions as red squares, ground truth as green
//! circles, and a red line from each tracked position to its truth.

use gyroprior_core::imaging::GrayFrame;
use gyroprior_core::Vec2;
use image::{Rgb, RgbImage};

use crate::pnm::quantize;

pub const TRACK_COLOR: Rgb<u8> = Rgb([255, 0, 0]);
pub const TRUTH_COLOR: Rgb<u8> = Rgb([0, 255, 0]);
/// Half the side of a tracked-position square, pixels.
pub const SQUARE_HALF: i64 = 4;
pub const CIRCLE_RADIUS: f64 = 5.0;

pub fn to_rgb(frame: &GrayFrame) -> RgbImage {
    RgbImage::from_fn(frame.width() as u32, frame.height() as u32, |x, y| {
        let v = quantize(frame.pixel(x as usize, y as usize));
        Rgb([v, v, v])
    })
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

fn pixel(p: Vec2) -> (i64, i64) {
    (p.x.round() as i64, p.y.round() as i64)
}

/// Square outline centred on `p`.
pub fn draw_square(img: &mut RgbImage, p: Vec2, c: Rgb<u8>) {
    let (cx, cy) = pixel(p);
    for d in -SQUARE_HALF..=SQUARE_HALF {
        put(img, cx + d, cy - SQUARE_HALF, c);
        put(img, cx + d, cy + SQUARE_HALF, c);
        put(img, cx - SQUARE_HALF, cy + d, c);
        put(img, cx + SQUARE_HALF, cy + d, c);
    }
}

/// Circle outline centred on `p`, sampled densely enough to stay connected.
pub fn draw_circle(img: &mut RgbImage, p: Vec2, r: f64, c: Rgb<u8>) {
    let (cx, cy) = pixel(p);
    let steps = (8.0 * r).ceil().max(8.0) as usize;
    for i in 0..steps {
        let a = i as f64 * std::f64::consts::TAU / steps as f64;
        put(img, cx + (r * a.cos()).round() as i64, cy + (r * a.sin()).round() as i64, c);
    }
}

/// Bresenham line including both endpoints.
pub fn draw_line(img: &mut RgbImage, a: Vec2, b: Vec2, c: Rgb<u8>) {
    let (mut x, mut y) = pixel(a);
    let (x1, y1) = pixel(b);
    let dx = (x1 - x).abs();
    let dy = -(y1 - y).abs();
    let sx = if x < x1 { 1 } else { -1 };
    let sy = if y < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(img, x, y, c);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// One frame's annotations. `links` pair a tracked position with its truth.
#[derive(Debug, Default)]
pub struct Annotations {
    pub tracked: Vec<Vec2>,
    pub truth: Vec<Vec2>,
    pub links: Vec<(Vec2, Vec2)>,
}

/// Circles first, then lines, then squares, so tracker output stays on top.
pub fn render(frame: &GrayFrame, a: &Annotations) -> RgbImage {
    let mut img = to_rgb(frame);
    for &p in &a.truth {
        draw_circle(&mut img, p, CIRCLE_RADIUS, TRUTH_COLOR);
    }
    for &(t, g) in &a.links {
        draw_line(&mut img, t, g, TRACK_COLOR);
    }
    for &p in &a.tracked {
        draw_square(&mut img, p, TRACK_COLOR);
    }
    img
}
