use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use gyroprior_core::bench::{evaluate, evaluate_variant, TrackReport, TrackSource};
use gyroprior_core::gyro::GyroStream;
use gyroprior_core::imaging::GrayFrame;
use gyroprior_core::tracker::{FeatureStatus, FeatureUpdate, TrackerVariant};
use gyroprior_core::Vec2;

use super::{no_clobber, out_dir, rate_line};
use crate::config::{optional_path, require_exists, require_path, RunConfig};
use crate::error::{CliError, Result};
use crate::frames::{DiskSequence, FrameDir};
use crate::fsio::{create_dir, write_text};
use crate::profiles::read_calibration;
use crate::tables::{read_gyro, read_trajectory, read_truth, write_table, TrajectoryRow};

/// Replays a trajectory file as a tracker. Replayed features cannot be moved,
/// so after a loss the file's own positions keep being scored.
pub struct Replay {
    rows: BTreeMap<(u64, u64), (Vec2, FeatureStatus)>,
    frame: u64,
    placed: BTreeSet<u64>,
}

impl Replay {
    pub fn new(rows: &[TrajectoryRow]) -> Self {
        let rows = rows.iter().map(|r| ((r.frame, r.feature_id), (r.position, r.status))).collect();
        Self { rows, frame: 0, placed: BTreeSet::new() }
    }
}

impl TrackSource for Replay {
    fn start(&mut self, _: &GrayFrame) -> gyroprior_core::Result<()> {
        self.frame = 0;
        self.placed.clear();
        Ok(())
    }

    fn place(&mut self, id: u64, _: Vec2) -> gyroprior_core::Result<()> {
        self.placed.insert(id);
        Ok(())
    }

    fn remove(&mut self, id: u64) {
        self.placed.remove(&id);
    }

    fn track(&mut self, _: &GrayFrame, _: Option<&GyroStream>) -> gyroprior_core::Result<Vec<FeatureUpdate>> {
        self.frame += 1;
        let k = self.frame;
        Ok(self
            .placed
            .iter()
            .filter_map(|&id| self.rows.get(&(k, id)).map(|&(position, status)| FeatureUpdate { id, position, status }))
            .collect())
    }
}

/// One row of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportLine {
    pub sequence: String,
    pub tracker: String,
    pub lambda: Option<f64>,
    pub report: TrackReport,
}

pub const REPORT_HEADER: [&str; 7] = ["sequence", "tracker", "lambda", "frames", "segments", "losses", "mean_track_length"];

pub fn report_text(lines: &[ReportLine], radius: f64, notes: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mean track length (frames between re-initializations), loss radius {radius} px");
    for n in notes {
        let _ = writeln!(s, "{n}");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<16} {:<20} {:>8} {:>7} {:>9} {:>7} {:>10}", "sequence", "tracker", "lambda", "frames", "segments", "losses", "mean");
    for l in lines {
        let lambda = l.lambda.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            s,
            "{:<16} {:<20} {:>8} {:>7} {:>9} {:>7} {:>10.2}",
            l.sequence,
            l.tracker,
            lambda,
            l.report.frames,
            l.report.segments.len(),
            l.report.loss_count(),
            l.report.mean_track_length()
        );
    }
    s
}

pub fn report_rows(lines: &[ReportLine]) -> Vec<Vec<String>> {
    lines
        .iter()
        .map(|l| {
            vec![
                l.sequence.clone(),
                l.tracker.clone(),
                l.lambda.map_or(String::new(), |v| v.to_string()),
                l.report.frames.to_string(),
                l.report.segments.len().to_string(),
                l.report.loss_count().to_string(),
                format!("{:.4}", l.report.mean_track_length()),
            ]
        })
        .collect()
}

/// Scores a trajectory file (`--trajectory`) or runs tracker variants over
/// the sequence. Without `--variant`, every variant whose inputs are present
/// is run; gyro variants are skipped with a note when there is no gyro.
pub fn run(cfg: &RunConfig, variant_given: bool, trajectory: Option<&Path>) -> Result<()> {
    let truth_path = require_path(&cfg.paths.truth, "--truth")?;
    let truth = read_truth(truth_path)?;
    let frames_dir = optional_path(&cfg.paths.frames, "--frames")?;
    let out = out_dir(cfg, frames_dir.as_slice())?;
    let (txt, csv) = (out.join("report.txt"), out.join("report.csv"));
    no_clobber(
        &[txt.clone(), csv.clone()],
        &[Some(truth_path), trajectory, cfg.paths.gyro.as_deref(), cfg.paths.calib.as_deref()],
    )?;
    let sequence = frames_dir
        .or(Some(truth_path))
        .and_then(|p| p.canonicalize().ok())
        .and_then(|p| p.parent().and_then(|d| d.file_name()).map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "sequence".into());

    let mut notes = Vec::new();
    let mut lines = Vec::new();
    if let Some(path) = trajectory {
        require_exists(path, "--trajectory")?;
        let replay_rows = read_trajectory(path)?;
        let count = match frames_dir {
            Some(d) => FrameDir::open(d, cfg.fps)?.len() as u64,
            None => truth.frame_count(),
        };
        if truth.frame_count() > count {
            return Err(CliError::data("ground truth runs past the last frame"));
        }
        // Replay ignores imagery, so a placeholder stands in for each frame.
        let frames = (0..count).map(|k| Ok(GrayFrame::filled(1, 1, 0.0).with_time(k, 0.0)));
        let report = evaluate(&mut Replay::new(&replay_rows), frames, None, &truth, cfg.loss_radius)?;
        let name = path.file_name().map_or("trajectory".into(), |n| n.to_string_lossy().into_owned());
        lines.push(ReportLine { sequence: sequence.clone(), tracker: name, lambda: None, report });
    } else {
        let frames_dir = frames_dir.ok_or_else(|| CliError::config("--frames is required unless --trajectory is given"))?;
        let gyro_path = optional_path(&cfg.paths.gyro, "--gyro")?;
        let calib_path = optional_path(&cfg.paths.calib, "--calib")?;
        let variants: Vec<TrackerVariant> = if variant_given {
            vec![cfg.variant]
        } else {
            TrackerVariant::ALL.to_vec()
        };
        let have_gyro = gyro_path.is_some() && calib_path.is_some();
        if variants.iter().any(|v| v.uses_gyro()) && !have_gyro {
            if variant_given {
                return Err(CliError::config(format!("{} needs --gyro and --calib", cfg.variant)));
            }
            notes.push("gyro variants skipped: no --gyro/--calib".to_string());
        }
        let gyro = gyro_path.map(read_gyro).transpose()?;
        if let Some(g) = &gyro {
            notes.push(rate_line("gyro", g)?);
        }
        let calibration = calib_path.map(read_calibration).transpose()?;
        let seq = DiskSequence::new(FrameDir::open(frames_dir, cfg.fps)?, gyro, calibration, truth)?;
        for v in variants.into_iter().filter(|v| have_gyro || !v.uses_gyro()) {
            let t = cfg.tracker_config(v);
            let report = evaluate_variant(t, &seq, cfg.loss_radius)?;
            let lambda = v.uses_penalty().then_some(t.energy.penalty.lambda);
            lines.push(ReportLine { sequence: sequence.clone(), tracker: v.to_string(), lambda, report });
        }
    }

    let text = report_text(&lines, cfg.loss_radius, &notes);
    create_dir(&out)?;
    write_text(&txt, &text)?;
    write_table(&csv, &REPORT_HEADER, report_rows(&lines))?;
    print!("{text}");
    Ok(())
}
