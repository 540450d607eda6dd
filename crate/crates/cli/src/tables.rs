//! CSV files: gyro samples, trajectories, ground truth, homographies, points.

use std::io::Write;
use std::path::Path;

use gyroprior_core::bench::GroundTruth;
use gyroprior_core::gyro::{GyroSample, GyroStream, Homography};
use gyroprior_core::tracker::FeatureStatus;
use gyroprior_core::{Mat3, Vec2};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{read_error, CliError, Result};
use crate::fsio::write_atomic;

pub const GYRO_HEADER: [&str; 4] = ["t", "rx", "ry", "rz"];
pub const TRAJECTORY_HEADER: [&str; 5] = ["frame", "feature_id", "x", "y", "status"];
pub const TRUTH_HEADER: [&str; 4] = ["frame", "feature_id", "x", "y"];
pub const POINTS_HEADER: [&str; 3] = ["feature_id", "x", "y"];
pub const HOMOGRAPHY_HEADER: [&str; 10] = ["frame", "h00", "h01", "h02", "h10", "h11", "h12", "h20", "h21", "h22"];

/// Reads every row of a CSV whose header must start with `expected`.
/// Extra trailing columns are allowed only when `allow_extra` is set.
fn read_rows<T: DeserializeOwned>(path: &Path, expected: &[&str], allow_extra: bool) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| read_error(path, e))?;
    let header = rdr.headers().map_err(|e| read_error(path, e))?.clone();
    let names: Vec<&str> = header.iter().collect();
    let ok = names.len() >= expected.len()
        && names[..expected.len()] == *expected
        && (allow_extra || names.len() == expected.len());
    if !ok {
        return Err(read_error(path, format!("expected header {}, found {}", expected.join(","), names.join(","))));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| read_error(path, format!("row {}: {e}", i + 1))))
        .collect()
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for r in rows {
            out.write_record(&r)?;
        }
        out.flush()
    })
}

#[derive(Deserialize)]
struct GyroRow {
    t: f64,
    rx: f64,
    ry: f64,
    rz: f64,
}

pub fn read_gyro(path: &Path) -> Result<GyroStream> {
    let rows: Vec<GyroRow> = read_rows(path, &GYRO_HEADER, false)?;
    let samples = rows.into_iter().map(|r| GyroSample::new(r.t, r.rx, r.ry, r.rz)).collect();
    GyroStream::new(samples).map_err(|e| read_error(path, e))
}

pub fn write_gyro(path: &Path, stream: &GyroStream) -> Result<()> {
    write_csv(
        path,
        &GYRO_HEADER,
        stream.samples().iter().map(|s| vec![s.t.to_string(), s.rate.x.to_string(), s.rate.y.to_string(), s.rate.z.to_string()]),
    )
}

/// One tracker output row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub frame: u64,
    pub feature_id: u64,
    pub position: Vec2,
    pub status: FeatureStatus,
}

#[derive(Deserialize)]
struct RawTrajectoryRow {
    frame: u64,
    feature_id: u64,
    x: f64,
    y: f64,
    status: Option<String>,
}

/// Reads a trajectory file. A ground-truth file (no status column) is read
/// as all-active rows.
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let raw: Vec<RawTrajectoryRow> = read_rows(path, &TRUTH_HEADER, true)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let status = match r.status.as_deref() {
                None | Some("") => FeatureStatus::Active,
                Some(s) => s.parse().map_err(|e| read_error(path, format!("row {}: {e}", i + 1)))?,
            };
            if !(r.x.is_finite() && r.y.is_finite()) {
                return Err(read_error(path, format!("row {}: non-finite position", i + 1)));
            }
            Ok(TrajectoryRow { frame: r.frame, feature_id: r.feature_id, position: Vec2::new(r.x, r.y), status })
        })
        .collect()
}

pub fn write_trajectory(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    write_csv(
        path,
        &TRAJECTORY_HEADER,
        rows.iter().map(|r| {
            vec![
                r.frame.to_string(),
                r.feature_id.to_string(),
                format!("{:.4}", r.position.x),
                format!("{:.4}", r.position.y),
                r.status.name().to_string(),
            ]
        }),
    )
}

#[derive(Deserialize)]
struct TruthRow {
    frame: u64,
    feature_id: u64,
    x: f64,
    y: f64,
}

pub fn read_truth(path: &Path) -> Result<GroundTruth> {
    let rows: Vec<TruthRow> = read_rows(path, &TRUTH_HEADER, false)?;
    GroundTruth::from_rows(rows.into_iter().map(|r| (r.frame, r.feature_id, Vec2::new(r.x, r.y))))
        .map_err(|e| read_error(path, e))
}

pub fn write_truth(path: &Path, truth: &GroundTruth) -> Result<()> {
    write_csv(
        path,
        &TRUTH_HEADER,
        truth
            .rows()
            .into_iter()
            .map(|(f, id, p)| vec![f.to_string(), id.to_string(), format!("{:.4}", p.x), format!("{:.4}", p.y)]),
    )
}

#[derive(Deserialize)]
struct PointRow {
    feature_id: u64,
    x: f64,
    y: f64,
}

pub fn read_points(path: &Path) -> Result<Vec<(u64, Vec2)>> {
    let rows: Vec<PointRow> = read_rows(path, &POINTS_HEADER, false)?;
    Ok(rows.into_iter().map(|r| (r.feature_id, Vec2::new(r.x, r.y))).collect())
}

#[derive(Deserialize)]
struct HomographyRow {
    frame: u64,
    h00: f64,
    h01: f64,
    h02: f64,
    h10: f64,
    h11: f64,
    h12: f64,
    h20: f64,
    h21: f64,
    h22: f64,
}

/// Rows `(k, H)` where `H` maps frame `k - 1` to frame `k`.
pub fn read_homographies(path: &Path) -> Result<Vec<(u64, Homography)>> {
    let rows: Vec<HomographyRow> = read_rows(path, &HOMOGRAPHY_HEADER, false)?;
    rows.into_iter()
        .map(|r| {
            let m = Mat3::new(r.h00, r.h01, r.h02, r.h10, r.h11, r.h12, r.h20, r.h21, r.h22);
            let h = Homography::new(m).map_err(|e| read_error(path, format!("frame {}: {e}", r.frame)))?;
            if r.frame == 0 {
                return Err(read_error(path, "frame 0 has no predecessor"));
            }
            Ok((r.frame, h))
        })
        .collect()
}

pub fn write_homographies(path: &Path, rows: &[(u64, Homography)]) -> Result<()> {
    write_csv(
        path,
        &HOMOGRAPHY_HEADER,
        rows.iter().map(|(k, h)| {
            let m = h.matrix();
            let mut r = vec![k.to_string()];
            for i in 0..3 {
                for j in 0..3 {
                    r.push(format!("{:e}", m[(i, j)]));
                }
            }
            r
        }),
    )
}

/// Plain CSV from already formatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    if rows.iter().any(|r| r.len() != header.len()) {
        return Err(CliError::processing("table row width does not match header"));
    }
    write_csv(path, header, rows.into_iter())
}

/// Writes a small two-column `frame,t` file.
pub fn write_timestamps(path: &Path, times: &[f64]) -> Result<()> {
    write_atomic(path, |w: &mut dyn Write| {
        writeln!(w, "frame,t")?;
        for (k, t) in times.iter().enumerate() {
            writeln!(w, "{k},{t}")?;
        }
        Ok(())
    })
}

#[derive(Deserialize)]
struct TimeRow {
    frame: u64,
    t: f64,
}

pub fn read_timestamps(path: &Path) -> Result<Vec<f64>> {
    let rows: Vec<TimeRow> = read_rows(path, &["frame", "t"], false)?;
    let mut out = Vec::with_capacity(rows.len());
    for (k, r) in rows.into_iter().enumerate() {
        if r.frame != k as u64 {
            return Err(read_error(path, format!("row {}: expected frame {k}", k + 1)));
        }
        if !r.t.is_finite() || out.last().is_some_and(|&p| r.t <= p) {
            return Err(read_error(path, format!("row {}: timestamps must be finite and increasing", k + 1)));
        }
        out.push(r.t);
    }
    Ok(out)
}
