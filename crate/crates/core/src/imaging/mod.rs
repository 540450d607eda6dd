//! Grayscale frames, image pyramids and subpixel sampling.
//!
//! Intensities are stored as `f64` in `[0, 255]` even for 8-bit sources, so
//! that interpolation and the degradation pipeline work on continuous values.

mod filter;
mod frame;
mod grid;
mod patch;
mod pyramid;
mod register;

pub use filter::{gaussian_blur, gaussian_kernel};
pub use frame::{sample_bilinear, GrayFrame};
pub use patch::{extract_patch, Patch};
pub use pyramid::{build_pyramid, Pyramid, PYRAMID_LEVELS};
pub use register::{register_coarse, DEFAULT_SEARCH_RADIUS, REGISTRATION_LEVEL};
pub(crate) use grid::for_each_grid_sample;
