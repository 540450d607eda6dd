use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use gyroprior_core::Vec2;

use super::{no_clobber, out_dir};
use crate::config::{optional_path, require_exists, require_path, RunConfig};
use crate::error::{CliError, Result};
use crate::frames::FrameDir;
use crate::fsio::create_dir;
use crate::overlay::{render, Annotations};
use crate::pnm::write_ppm;
use crate::tables::{read_trajectory, read_truth};

/// Writes `frame_NNNNNN.ppm` for every frame. Tracked ids without ground
/// truth are listed on stderr and drawn without a connecting line.
pub fn run(cfg: &RunConfig, trajectory: &Path) -> Result<()> {
    let frames_dir = require_path(&cfg.paths.frames, "--frames")?;
    require_exists(trajectory, "--trajectory")?;
    let rows = read_trajectory(trajectory)?;
    let truth = optional_path(&cfg.paths.truth, "--truth")?.map(read_truth).transpose()?;
    let out = out_dir(cfg, &[frames_dir])?;
    let frames = FrameDir::open(frames_dir, cfg.fps)?;
    if let Some(r) = rows.iter().find(|r| r.frame >= frames.len() as u64) {
        return Err(CliError::data(format!("{}: frame {} does not exist", trajectory.display(), r.frame)));
    }
    let outputs: Vec<_> = (0..frames.len()).map(|k| out.join(format!("frame_{k:06}.ppm"))).collect();
    no_clobber(&outputs, &[Some(trajectory), cfg.paths.truth.as_deref()])?;

    let mut tracked: BTreeMap<u64, Vec<(u64, Vec2)>> = BTreeMap::new();
    for r in &rows {
        tracked.entry(r.frame).or_default().push((r.feature_id, r.position));
    }
    if let Some(t) = &truth {
        let orphans: BTreeSet<u64> = rows.iter().map(|r| r.feature_id).filter(|id| t.track(*id).is_none()).collect();
        if !orphans.is_empty() {
            let ids: Vec<String> = orphans.iter().map(u64::to_string).collect();
            eprintln!("no ground truth for feature ids {}; drawn without links", ids.join(", "));
        }
    }

    create_dir(&out)?;
    for (k, path) in outputs.iter().enumerate() {
        let k64 = k as u64;
        let mut a = Annotations::default();
        for &(id, p) in tracked.get(&k64).map(Vec::as_slice).unwrap_or_default() {
            a.tracked.push(p);
            if let Some(g) = truth.as_ref().and_then(|t| t.track(id)).and_then(|t| t.at(k64)) {
                a.links.push((p, g));
            }
        }
        if let Some(t) = &truth {
            a.truth.extend(t.tracks().iter().filter_map(|t| t.at(k64)));
        }
        write_ppm(path, &render(&frames.load(k)?, &a))?;
    }
    println!("wrote {} overlay frames", outputs.len());
    Ok(())
}
