use std::path::Path;

use gyroprior_core::bench::degrade_frame;

use super::out_dir;
use crate::config::{require_exists, require_path, RunConfig};
use crate::error::Result;
use crate::frames::{frame_file_name, FrameDir, TIMESTAMPS_FILE};
use crate::fsio::{create_dir, write_text};
use crate::pnm::write_pgm;
use crate::profiles::{degradation_preset, degradation_text, read_degradation};
use crate::tables::write_timestamps;

/// Degrades every frame. The profile is the config's `degrade.*` keys unless
/// `--profile` or `--preset` replaces it; `--seed` always wins. Writes the
/// frames, their timestamps and the profile actually used.
pub fn run(cfg: &RunConfig, profile: Option<&Path>, preset: Option<&str>, seed: Option<u64>) -> Result<()> {
    let frames_dir = require_path(&cfg.paths.frames, "--frames")?;
    let mut p = cfg.degradation;
    if let Some(path) = profile {
        require_exists(path, "--profile")?;
        p = read_degradation(path)?;
    }
    if let Some(name) = preset {
        p = degradation_preset(name, cfg.seed)?;
    }
    if let Some(s) = seed {
        p.seed = s;
    }
    p.validate()?;
    let out = out_dir(cfg, &[frames_dir])?;
    let frames = FrameDir::open(frames_dir, cfg.fps)?;

    create_dir(&out)?;
    for k in 0..frames.len() {
        let degraded = degrade_frame(&frames.load(k)?, &p, k as u64)?;
        write_pgm(&out.join(frame_file_name(k)), &degraded)?;
    }
    write_timestamps(&out.join(TIMESTAMPS_FILE), frames.times())?;
    write_text(&out.join("profile.txt"), &degradation_text(&p))?;
    println!("degraded {} frames (m {}, sigma1 {}, blur {}x{}, sigma2 {}, seed {})", frames.len(), p.m, p.sigma1, p.sigma_x, p.sigma_y, p.sigma2, p.seed);
    Ok(())
}
