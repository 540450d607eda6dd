//! PGM/PPM frames.

use std::io::Write;
use std::path::Path;

use gyroprior_core::imaging::GrayFrame;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, RgbImage};

use crate::error::{read_error, Result};
use crate::fsio::write_atomic;

/// Luma of an RGB triple, rounded to the nearest 8-bit level.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round().clamp(0.0, 255.0) as u8
}

/// Reads any PNM image. Color images are converted to gray with [`luma`].
pub fn read_gray(path: &Path) -> Result<GrayFrame> {
    let img = image::ImageReader::open(path)
        .and_then(|r| r.with_guessed_format())
        .map_err(|e| read_error(path, e))?
        .decode()
        .map_err(|e| read_error(path, e))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values: Vec<f64> = match img {
        DynamicImage::ImageLuma8(g) => g.into_raw().into_iter().map(f64::from).collect(),
        other => other.to_rgb8().pixels().map(|p| luma(p[0], p[1], p[2]) as f64).collect(),
    };
    GrayFrame::new(w, h, values).map_err(|e| read_error(path, e))
}

/// Nearest 8-bit level, saturating.
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn gray_bytes(frame: &GrayFrame) -> Vec<u8> {
    frame.data().iter().map(|&v| quantize(v)).collect()
}

/// Binary (P5) PGM.
pub fn write_pgm(path: &Path, frame: &GrayFrame) -> Result<()> {
    let bytes = gray_bytes(frame);
    let (w, h) = (frame.width() as u32, frame.height() as u32);
    write_atomic(path, |out| encode(out, PnmSubtype::Graymap(SampleEncoding::Binary), &bytes, w, h, ExtendedColorType::L8))
}

/// Binary (P6) PPM.
pub fn write_ppm(path: &Path, img: &RgbImage) -> Result<()> {
    let (w, h) = img.dimensions();
    write_atomic(path, |out| encode(out, PnmSubtype::Pixmap(SampleEncoding::Binary), img.as_raw(), w, h, ExtendedColorType::Rgb8))
}

fn encode(
    out: &mut dyn Write,
    subtype: PnmSubtype,
    bytes: &[u8],
    w: u32,
    h: u32,
    color: ExtendedColorType,
) -> std::io::Result<()> {
    PnmEncoder::new(out)
        .with_subtype(subtype)
        .write_image(bytes, w, h, color)
        .map_err(std::io::Error::other)
}
