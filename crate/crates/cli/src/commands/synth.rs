use gyroprior_core::bench::{synth_sequence, Sequence};
use gyroprior_core::gyro::Homography;

use super::out_dir;
use crate::cli::SceneArgs;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::frames::{frame_file_name, TIMESTAMPS_FILE};
use crate::fsio::{create_dir, write_text};
use crate::kv::parse_array;
use crate::pnm::write_pgm;
use crate::profiles::write_calibration;
use crate::tables::{write_gyro, write_homographies, write_timestamps, write_truth};

/// Renders a scene into `--out`:
///
/// ```text
/// frames/frame_NNNNNN.pgm, frames/timestamps.csv
/// gyro.csv  calib.txt  truth.csv  homographies.csv  scene.txt
/// ```
///
/// `homographies.csv` holds the exact frame-to-frame maps and `scene.txt`
/// the full run configuration, so the output can be regenerated.
pub fn run(cfg: &RunConfig, args: &SceneArgs) -> Result<()> {
    let mut cfg = cfg.clone();
    let s = &mut cfg.scene;
    if let Some(v) = args.scene {
        s.kind = v;
    }
    for (slot, v) in [(&mut s.frames, args.count), (&mut s.width, args.width), (&mut s.height, args.height), (&mut s.features, args.features)] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    for (slot, v) in [(&mut s.wobble, args.wobble), (&mut s.roll, args.roll), (&mut s.latency, args.latency), (&mut s.drift, args.drift)] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if let Some(b) = &args.gyro_bias {
        s.gyro_bias = parse_array::<3>(b).map_err(|e| CliError::config(format!("--gyro-bias: {e}")))?;
    }
    if let Some(d) = &args.degrade {
        s.degrade.clone_from(d);
    }
    let out = out_dir(&cfg, &[])?;
    let spec = cfg.scene.build(cfg.fps, cfg.seed)?;
    let seq = synth_sequence(spec, &cfg.scene.camera()?)?;
    if let Some(k) = seq.exhausted_at() {
        eprintln!("warning: every feature has left the trackable area by frame {k}");
    }

    let frames_dir = out.join("frames");
    create_dir(&frames_dir)?;
    for k in 0..seq.len() {
        write_pgm(&frames_dir.join(frame_file_name(k)), &seq.frame(k)?)?;
    }
    let times: Vec<f64> = (0..seq.len()).map(|k| k as f64 / cfg.fps).collect();
    write_timestamps(&frames_dir.join(TIMESTAMPS_FILE), &times)?;
    write_gyro(&out.join("gyro.csv"), seq.gyro().expect("synthetic sequences carry a gyro"))?;
    write_calibration(&out.join("calib.txt"), seq.calibration().expect("synthetic sequences are calibrated"))?;
    write_truth(&out.join("truth.csv"), seq.truth())?;
    let steps: Vec<(u64, Homography)> =
        (1..seq.len()).map(|k| (k as u64, seq.plane_to_frame(k).after(&seq.plane_to_frame(k - 1).inverse()))).collect();
    write_homographies(&out.join("homographies.csv"), &steps)?;
    write_text(&out.join("scene.txt"), &cfg.to_text())?;
    println!(
        "rendered {} frames of {} ({}x{}), {} features with ground truth",
        seq.len(),
        cfg.scene.kind,
        cfg.scene.width,
        cfg.scene.height,
        seq.truth().tracks().len()
    );
    Ok(())
}
