use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use gyroprior_core::gyro::{
    self, calibrate_k_tilde, calibration_residual, estimate_bias, gyro_homography, integrate_rotation_debiased,
    predict_feature_positions, CalibrationProfile, FrameSeries,
};
use gyroprior_core::tracker::FeatureStatus;
use gyroprior_core::{Vec2, Vec3};

use super::{no_clobber, out_dir, rate_line};
use crate::config::{optional_path, require_exists, require_path, RunConfig};
use crate::error::{CliError, Result};
use crate::frames::FrameDir;
use crate::fsio::create_dir;
use crate::kv::parse_array;
use crate::profiles::{read_calibration, write_calibration};
use crate::tables::{read_gyro, read_homographies, read_points, read_trajectory, write_gyro, write_homographies, write_trajectory, TrajectoryRow};

/// Writes `homographies.csv` (row `k` maps frame `k - 1` to frame `k`) and,
/// with `--points`, `predicted.csv`: the points carried through the chain.
/// Points that land on or behind infinity are reported `lost-degenerate`,
/// points leaving the frame `lost-boundary`, and both are then dropped.
pub fn predict_flow(cfg: &RunConfig, points: Option<&Path>) -> Result<()> {
    let frames_dir = require_path(&cfg.paths.frames, "--frames")?;
    let stream = read_gyro(require_path(&cfg.paths.gyro, "--gyro")?)?;
    let cal = read_calibration(require_path(&cfg.paths.calib, "--calib")?)?;
    if let Some(p) = points {
        require_exists(p, "--points")?;
    }
    let points = points.map(read_points).transpose()?;
    let out = out_dir(cfg, &[frames_dir])?;
    let (h_path, p_path) = (out.join("homographies.csv"), out.join("predicted.csv"));
    no_clobber(&[h_path.clone(), p_path.clone()], &[cfg.paths.gyro.as_deref(), cfg.paths.calib.as_deref()])?;
    let frames = FrameDir::open(frames_dir, cfg.fps)?;
    let t = frames.times();

    let mut homographies = Vec::with_capacity(frames.len());
    for k in 1..frames.len() {
        homographies.push((k as u64, gyro_homography(&stream, &cal, t[k - 1], t[k])?));
    }

    let mut rows = Vec::new();
    if let Some(points) = &points {
        let first = frames.load(0)?;
        let mut live: Vec<(u64, Vec2)> = points.clone();
        rows.extend(live.iter().map(|&(id, p)| TrajectoryRow { frame: 0, feature_id: id, position: p, status: FeatureStatus::Active }));
        for (k, h) in &homographies {
            let positions: Vec<Vec2> = live.iter().map(|l| l.1).collect();
            let mapped = predict_feature_positions(&positions, h);
            let mut next = Vec::with_capacity(live.len());
            for ((id, prev), m) in live.iter().zip(mapped) {
                let (position, status) = match m {
                    Err(_) => (*prev, FeatureStatus::LostDegenerate),
                    Ok(p) if !first.contains(p) => (p, FeatureStatus::LostBoundary),
                    Ok(p) => {
                        next.push((*id, p));
                        (p, FeatureStatus::Active)
                    }
                };
                rows.push(TrajectoryRow { frame: *k, feature_id: *id, position, status });
            }
            live = next;
        }
    }

    create_dir(&out)?;
    write_homographies(&h_path, &homographies)?;
    if points.is_some() {
        write_trajectory(&p_path, &rows)?;
    }
    println!("{} homographies over {} frames", homographies.len(), frames.len());
    println!("{}", rate_line("gyro", &stream)?);
    Ok(())
}

/// Bias and latency from `--calib` when given, zero otherwise.
fn bias_and_latency(cfg: &RunConfig) -> Result<(Option<CalibrationProfile>, Vec3, f64)> {
    match optional_path(&cfg.paths.calib, "--calib")? {
        Some(p) => {
            let c = read_calibration(p)?;
            Ok((Some(c), c.bias, c.latency))
        }
        None => Ok((None, Vec3::zeros(), 0.0)),
    }
}

/// Pairs each measured homography with the gyro rotation over the same frame
/// interval and solves for the combined matrix. Bias and latency are taken
/// from `--calib` if present and carried into the output unchanged.
pub fn calibrate_kmat(cfg: &RunConfig, homographies: &Path) -> Result<()> {
    let frames_dir = require_path(&cfg.paths.frames, "--frames")?;
    let stream = read_gyro(require_path(&cfg.paths.gyro, "--gyro")?)?;
    require_exists(homographies, "--homographies")?;
    let (_, bias, latency) = bias_and_latency(cfg)?;
    let measured = read_homographies(homographies)?;
    let out = out_dir(cfg, &[frames_dir])?;
    let calib_path = out.join("calib.txt");
    no_clobber(std::slice::from_ref(&calib_path), &[cfg.paths.calib.as_deref(), cfg.paths.gyro.as_deref(), Some(homographies)])?;
    let frames = FrameDir::open(frames_dir, cfg.fps)?;
    let t = frames.times();

    let mut pairs = Vec::with_capacity(measured.len());
    for (k, h) in measured {
        let k = k as usize;
        if k >= frames.len() {
            return Err(CliError::data(format!("{}: frame {k} is past the last frame", homographies.display())));
        }
        let attitude = integrate_rotation_debiased(&stream, bias, t[k - 1] + latency, t[k] + latency)?;
        pairs.push((attitude.inverse(), h));
    }
    let solved = calibrate_k_tilde(&pairs)?;
    let residual = calibration_residual(&solved.k_tilde, &pairs)?;
    let cal = CalibrationProfile::new(solved.k_tilde, bias, latency)?;

    create_dir(&out)?;
    write_calibration(&calib_path, &cal)?;
    println!("calibrated from {} pairs, residual {residual:.3e}", pairs.len());
    for r in 0..3 {
        println!("  {:>14.6} {:>14.6} {:>14.6}", cal.k_tilde[(r, 0)], cal.k_tilde[(r, 1)], cal.k_tilde[(r, 2)]);
    }
    Ok(())
}

/// Mean displacement of the features present in consecutive frames, for
/// frames `1..=last`. Frames with no such feature contribute 0.
pub fn flow_magnitudes(rows: &[TrajectoryRow]) -> Vec<f64> {
    let mut by_frame: BTreeMap<u64, HashMap<u64, Vec2>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.status == FeatureStatus::Active) {
        by_frame.entry(r.frame).or_default().insert(r.feature_id, r.position);
    }
    let last = by_frame.keys().next_back().copied().unwrap_or(0);
    let empty = HashMap::new();
    (1..=last)
        .map(|k| {
            let prev = by_frame.get(&(k - 1)).unwrap_or(&empty);
            let cur = by_frame.get(&k).unwrap_or(&empty);
            let d: Vec<f64> = cur.iter().filter_map(|(id, p)| prev.get(id).map(|q| (p - q).norm())).collect();
            if d.is_empty() { 0.0 } else { d.iter().sum::<f64>() / d.len() as f64 }
        })
        .collect()
}

/// Cross-correlates per-frame image flow from `--trajectory` with the gyro
/// rate magnitude. Frame times come from `--frames` when given. With
/// `--calib` and `--out`, writes the profile back with the new latency.
pub fn estimate_latency(cfg: &RunConfig, trajectory: &Path, max_lag: f64) -> Result<()> {
    let stream = read_gyro(require_path(&cfg.paths.gyro, "--gyro")?)?;
    require_exists(trajectory, "--trajectory")?;
    if !(max_lag.is_finite() && max_lag >= 0.0) {
        return Err(CliError::config("--max-lag must be non-negative"));
    }
    let (calib, bias, _) = bias_and_latency(cfg)?;
    let frames = optional_path(&cfg.paths.frames, "--frames")?.map(|d| FrameDir::open(d, cfg.fps)).transpose()?;
    let out = cfg.paths.out.as_deref();
    if let Some(o) = out {
        no_clobber(&[o.join("calib.txt")], &[cfg.paths.calib.as_deref()])?;
    }
    let flow = flow_magnitudes(&read_trajectory(trajectory)?);
    let (start, period) = match &frames {
        Some(f) => {
            let period = f.period().ok_or_else(|| CliError::data("need at least two frames"))?;
            if flow.len() >= f.len() {
                return Err(CliError::data("trajectory has frames past the end of --frames"));
            }
            (f.times()[0] + period, period)
        }
        None => (1.0 / cfg.fps, 1.0 / cfg.fps),
    };
    let series = FrameSeries { start, period, values: flow };
    let latency = gyro::estimate_latency(&series, &gyro::debias(&stream, bias), max_lag)?;
    println!("latency = {latency}");
    if let (Some(mut cal), Some(o)) = (calib, out) {
        cal.latency = latency;
        create_dir(o)?;
        write_calibration(&o.join("calib.txt"), &cal)?;
    }
    Ok(())
}

/// Estimates the bias over a still window and writes the corrected stream.
/// With `--calib`, also writes the profile with the new bias, for use with the
/// original (uncorrected) stream.
pub fn debias(cfg: &RunConfig, window: Option<&str>) -> Result<()> {
    let gyro_path = require_path(&cfg.paths.gyro, "--gyro")?;
    let stream = read_gyro(gyro_path)?;
    let calib = optional_path(&cfg.paths.calib, "--calib")?.map(read_calibration).transpose()?;
    let (t0, t1) = match window {
        Some(w) => {
            let [a, b] = parse_array::<2>(w).map_err(|e| CliError::config(format!("--window: {e}")))?;
            (a, b)
        }
        None => {
            let (a, _) = stream.span().ok_or_else(|| CliError::data("empty gyro stream"))?;
            (a, a + 1.0)
        }
    };
    let out = cfg.out_dir()?;
    let (g_path, c_path) = (out.join("gyro.csv"), out.join("calib.txt"));
    no_clobber(&[g_path.clone(), c_path.clone()], &[Some(gyro_path), cfg.paths.calib.as_deref()])?;

    let bias = estimate_bias(&stream, t0, t1)?;
    let corrected = gyro::debias(&stream, bias);
    create_dir(out)?;
    write_gyro(&g_path, &corrected)?;
    if let Some(mut cal) = calib {
        cal.bias = bias;
        write_calibration(&c_path, &cal)?;
    }
    println!("bias = {} {} {}", bias.x, bias.y, bias.z);
    println!("{}", rate_line("raw", &stream)?);
    println!("{}", rate_line("corrected", &corrected)?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(frame: u64, id: u64, x: f64, status: FeatureStatus) -> TrajectoryRow {
        TrajectoryRow { frame, feature_id: id, position: Vec2::new(x, 0.0), status }
    }

    #[test]
    fn flow_averages_features_seen_in_both_frames() {
        let rows = vec![
            row(0, 1, 0.0, FeatureStatus::Active),
            row(0, 2, 0.0, FeatureStatus::Active),
            row(1, 1, 2.0, FeatureStatus::Active),
            row(1, 2, 4.0, FeatureStatus::Active),
            row(2, 1, 3.0, FeatureStatus::Active),
            row(2, 2, 9.0, FeatureStatus::LostBoundary),
            row(4, 1, 3.0, FeatureStatus::Active),
        ];
        assert_eq!(flow_magnitudes(&rows), vec![3.0, 1.0, 0.0, 0.0]);
    }
}
