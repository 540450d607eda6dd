use std::collections::BTreeMap;
use std::time::Instant;

use gyroprior_core::bench::GroundTruth;
use gyroprior_core::tracker::{detect_features, FeatureStatus, Tracker};

use super::{no_clobber, out_dir};
use crate::config::{optional_path, require_path, RunConfig};
use crate::error::{CliError, Result};
use crate::frames::FrameDir;
use crate::fsio::{create_dir, write_text};
use crate::kv::KvWriter;
use crate::profiles::read_calibration;
use crate::tables::{read_gyro, read_truth, write_trajectory, TrajectoryRow};

/// Runs the configured variant. Features come from the ground truth when
/// `--truth` is given (placed at their birth frames, keeping their ids) and
/// from the corner detector on the first frame otherwise.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let frames_dir = require_path(&cfg.paths.frames, "--frames")?;
    let variant = cfg.variant;
    let (gyro, calibration) = if variant.uses_gyro() {
        let need = |flag: &str| CliError::config(format!("{variant} needs {flag}"));
        let g = require_path(&cfg.paths.gyro, "--gyro").map_err(|e| if cfg.paths.gyro.is_none() { need("--gyro") } else { e })?;
        let c = require_path(&cfg.paths.calib, "--calib").map_err(|e| if cfg.paths.calib.is_none() { need("--calib") } else { e })?;
        (Some(read_gyro(g)?), Some(read_calibration(c)?))
    } else {
        (None, None)
    };
    let truth = optional_path(&cfg.paths.truth, "--truth")?.map(read_truth).transpose()?;
    let out = out_dir(cfg, &[frames_dir])?;
    let (traj_path, summary_path) = (out.join("trajectory.csv"), out.join("summary.txt"));
    no_clobber(
        &[traj_path.clone(), summary_path.clone()],
        &[cfg.paths.gyro.as_deref(), cfg.paths.calib.as_deref(), cfg.paths.truth.as_deref()],
    )?;
    let frames = FrameDir::open(frames_dir, cfg.fps)?;
    let mut tracker = Tracker::new(cfg.tracker(), calibration)?;

    let first = frames.load(0)?;
    tracker.start(&first)?;
    let mut rows = Vec::new();
    let mut started = 0usize;
    let mut unplaceable = 0usize;
    match &truth {
        Some(t) => seed_from_truth(&mut tracker, t, 0, &mut rows, &mut started, &mut unplaceable),
        None => {
            for p in detect_features(&first, cfg.max_features, cfg.min_spacing) {
                match tracker.add_feature(p) {
                    Ok(id) => {
                        rows.push(TrajectoryRow { frame: 0, feature_id: id, position: p, status: FeatureStatus::Active });
                        started += 1;
                    }
                    Err(_) => unplaceable += 1,
                }
            }
        }
    }

    let mut lost: BTreeMap<&'static str, usize> = BTreeMap::new();
    let clock = Instant::now();
    for k in 1..frames.len() {
        let frame = frames.load(k)?;
        for u in tracker.track_frame(&frame, gyro.as_ref())? {
            if u.status != FeatureStatus::Active {
                *lost.entry(u.status.name()).or_default() += 1;
            }
            rows.push(TrajectoryRow { frame: k as u64, feature_id: u.id, position: u.position, status: u.status });
        }
        if let Some(t) = &truth {
            seed_from_truth(&mut tracker, t, k as u64, &mut rows, &mut started, &mut unplaceable);
        }
    }
    let seconds = clock.elapsed().as_secs_f64();
    let tracked = frames.len().saturating_sub(1);
    let fps = if seconds > 0.0 { tracked as f64 / seconds } else { f64::INFINITY };

    let t = cfg.tracker();
    let mut summary = KvWriter::new();
    summary
        .put("variant", variant)
        .put("lambda", if variant.uses_penalty() { t.energy.penalty.lambda } else { 0.0 })
        .put("frames", frames.len())
        .put("features", started)
        .put("unplaceable", unplaceable)
        .put("active_at_end", tracker.features().len())
        .put("lost_boundary", lost.get("lost-boundary").copied().unwrap_or(0))
        .put("lost_degenerate", lost.get("lost-degenerate").copied().unwrap_or(0))
        .put("seconds", format!("{seconds:.3}"))
        .put("fps", format!("{fps:.1}"));
    let summary = summary.finish();

    create_dir(&out)?;
    write_trajectory(&traj_path, &rows)?;
    write_text(&summary_path, &summary)?;
    print!("{summary}");
    Ok(())
}

fn seed_from_truth(
    tracker: &mut Tracker,
    truth: &GroundTruth,
    frame: u64,
    rows: &mut Vec<TrajectoryRow>,
    started: &mut usize,
    unplaceable: &mut usize,
) {
    for t in truth.tracks().iter().filter(|t| t.birth == frame) {
        let p = t.at(frame).expect("birth frame is in range");
        if tracker.add_feature_with_id(t.id, p).is_ok() {
            rows.push(TrajectoryRow { frame, feature_id: t.id, position: p, status: FeatureStatus::Active });
            *started += 1;
        } else {
            *unplaceable += 1;
        }
    }
}
