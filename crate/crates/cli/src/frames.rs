//! Frame directories: `frame_%06d.pgm` files plus an optional `timestamps.csv`.

use std::path::{Path, PathBuf};

use gyroprior_core::bench::{GroundTruth, Sequence};
use gyroprior_core::gyro::{CalibrationProfile, GyroStream};
use gyroprior_core::imaging::GrayFrame;

use crate::error::{read_error, CliError, Result};
use crate::pnm;
use crate::tables::{read_gyro, read_timestamps, read_truth};

pub const TIMESTAMPS_FILE: &str = "timestamps.csv";

pub fn frame_file_name(k: usize) -> String {
    format!("frame_{k:06}.pgm")
}

fn frame_index(name: &str) -> Option<usize> {
    let stem = name.strip_prefix("frame_")?;
    let (digits, ext) = stem.split_once('.')?;
    if !matches!(ext, "pgm" | "ppm" | "pnm") || digits.len() < 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// A numbered image sequence on disk. Frames are decoded on demand.
#[derive(Debug, Clone)]
pub struct FrameDir {
    dir: PathBuf,
    paths: Vec<PathBuf>,
    times: Vec<f64>,
}

impl FrameDir {
    /// Lists `dir`. Frame numbers must run from 0 without gaps. Without a
    /// timestamps file, frame `k` is stamped `k / fps`.
    pub fn open(dir: &Path, fps: f64) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| read_error(dir, e))?;
        let mut numbered = Vec::new();
        for e in entries {
            let e = e.map_err(|e| read_error(dir, e))?;
            if let Some(k) = e.file_name().to_str().and_then(frame_index) {
                numbered.push((k, e.path()));
            }
        }
        numbered.sort();
        for (i, (k, p)) in numbered.iter().enumerate() {
            if *k != i {
                return Err(read_error(p, format!("expected frame number {i}; frames must be numbered from 0 without gaps or duplicates")));
            }
        }
        if numbered.is_empty() {
            return Err(read_error(dir, "no frame_NNNNNN.pgm files"));
        }
        let ts_path = dir.join(TIMESTAMPS_FILE);
        let times = if ts_path.exists() {
            let t = read_timestamps(&ts_path)?;
            if t.len() != numbered.len() {
                return Err(read_error(&ts_path, format!("{} timestamps for {} frames", t.len(), numbered.len())));
            }
            t
        } else {
            if !(fps.is_finite() && fps > 0.0) {
                return Err(CliError::config("frame rate must be positive"));
            }
            (0..numbered.len()).map(|k| k as f64 / fps).collect()
        };
        Ok(Self { dir: dir.to_path_buf(), paths: numbered.into_iter().map(|(_, p)| p).collect(), times })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Mean frame period.
    pub fn period(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64)
    }

    pub fn load(&self, k: usize) -> Result<GrayFrame> {
        let path = self.paths.get(k).ok_or_else(|| CliError::data(format!("frame {k} out of range")))?;
        Ok(pnm::read_gray(path)?.with_time(k as u64, self.times[k]))
    }
}

/// Frames, gyro, calibration and ground truth read from disk.
pub struct DiskSequence {
    pub frames: FrameDir,
    pub gyro: Option<GyroStream>,
    pub calibration: Option<CalibrationProfile>,
    pub truth: GroundTruth,
}

impl DiskSequence {
    /// Truth rows past the last frame are a data error.
    pub fn new(frames: FrameDir, gyro: Option<GyroStream>, calibration: Option<CalibrationProfile>, truth: GroundTruth) -> Result<Self> {
        if truth.frame_count() > frames.len() as u64 {
            return Err(CliError::data(format!(
                "ground truth reaches frame {} but {} has {} frames",
                truth.frame_count() - 1,
                frames.dir().display(),
                frames.len()
            )));
        }
        Ok(Self { frames, gyro, calibration, truth })
    }

    /// A directory laid out like `synth` output: `frames/`, `truth.csv`, and
    /// optionally `gyro.csv` and `calib.txt`.
    pub fn open_dir(dir: &Path, fps: f64) -> Result<Self> {
        let frames = FrameDir::open(&dir.join("frames"), fps)?;
        let opt = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
        let gyro = opt("gyro.csv").map(|p| read_gyro(&p)).transpose()?;
        let calibration = opt("calib.txt").map(|p| crate::profiles::read_calibration(&p)).transpose()?;
        let truth = read_truth(&dir.join("truth.csv"))?;
        Self::new(frames, gyro, calibration, truth)
    }
}

impl Sequence for DiskSequence {
    fn len(&self) -> usize {
        self.frames.len()
    }

    fn frame(&self, k: usize) -> gyroprior_core::Result<GrayFrame> {
        // Sequence frames come through the core error type; a decode failure
        // after a successful listing is reported as bad data.
        self.frames.load(k).map_err(|_| gyroprior_core::Error::Data("unreadable frame file"))
    }

    fn gyro(&self) -> Option<&GyroStream> {
        self.gyro.as_ref()
    }

    fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    fn calibration(&self) -> Option<&CalibrationProfile> {
        self.calibration.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::write_timestamps;

    #[test]
    fn names_are_recognised() {
        assert_eq!(frame_index("frame_000012.pgm"), Some(12));
        assert_eq!(frame_index("frame_1234567.ppm"), Some(1234567));
        assert_eq!(frame_index("frame_12.pgm"), None);
        assert_eq!(frame_index("frame_000001.png"), None);
        assert_eq!(frame_index("timestamps.csv"), None);
        assert_eq!(frame_file_name(7), "frame_000007.pgm");
    }

    #[test]
    fn gaps_are_rejected_and_times_default_to_fps() {
        let dir = tempfile::tempdir().unwrap();
        let f = GrayFrame::filled(4, 4, 9.0);
        for k in [0, 1, 2] {
            pnm::write_pgm(&dir.path().join(frame_file_name(k)), &f).unwrap();
        }
        let fd = FrameDir::open(dir.path(), 30.0).unwrap();
        assert_eq!(fd.len(), 3);
        assert_eq!(fd.times()[2], 2.0 / 30.0);
        assert_eq!(fd.load(1).unwrap().frame_index, 1);

        write_timestamps(&dir.path().join(TIMESTAMPS_FILE), &[0.0, 0.5, 0.75]).unwrap();
        assert_eq!(FrameDir::open(dir.path(), 30.0).unwrap().times(), &[0.0, 0.5, 0.75]);

        pnm::write_pgm(&dir.path().join(frame_file_name(4)), &f).unwrap();
        assert!(matches!(FrameDir::open(dir.path(), 30.0), Err(CliError::Data(_))));
    }
}
