//! Calibration profile and degradation profile files.

use std::path::Path;

use gyroprior_core::bench::DegradationProfile;
use gyroprior_core::gyro::CalibrationProfile;
use gyroprior_core::{Mat3, Vec3};

use crate::error::{CliError, Result};
use crate::fsio::write_text;
use crate::kv::{KeyValues, KvWriter};

pub fn calibration_from_kv(kv: &mut KeyValues) -> Result<CalibrationProfile> {
    let k = kv.take_array::<9>("k_tilde")?.ok_or_else(|| CliError::data("missing key k_tilde"))?;
    let bias = kv.take_array::<3>("bias")?.unwrap_or([0.0; 3]);
    let latency = kv.take::<f64>("latency")?.unwrap_or(0.0);
    CalibrationProfile::new(Mat3::from_row_slice(&k), Vec3::from(bias), latency).map_err(CliError::data)
}

pub fn read_calibration(path: &Path) -> Result<CalibrationProfile> {
    let mut kv = KeyValues::load(path)?;
    let cal = calibration_from_kv(&mut kv).map_err(|e| e.at(path))?;
    kv.finish().map_err(|e| e.at(path))?;
    Ok(cal)
}

pub fn calibration_text(cal: &CalibrationProfile) -> String {
    let k: Vec<f64> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).map(|rc| cal.k_tilde[rc]).collect();
    KvWriter::new()
        .comment("intrinsics times gyro-to-camera rotation, row-major")
        .put_array("k_tilde", &k)
        .comment("gyro bias, rad/s")
        .put_array("bias", cal.bias.as_slice())
        .comment("gyro clock minus camera clock, seconds")
        .put("latency", cal.latency)
        .finish()
}

pub fn write_calibration(path: &Path, cal: &CalibrationProfile) -> Result<()> {
    write_text(path, &calibration_text(cal))
}

/// Reads the degradation keys, each defaulting to `base`. `prefix` is
/// prepended to every key (`"degrade."` inside a run config).
pub fn degradation_from_kv(kv: &mut KeyValues, prefix: &str, base: DegradationProfile) -> Result<DegradationProfile> {
    let mut p = base;
    for (name, slot) in [
        ("m", &mut p.m),
        ("mu1", &mut p.mu1),
        ("sigma1", &mut p.sigma1),
        ("sigma_x", &mut p.sigma_x),
        ("sigma_y", &mut p.sigma_y),
        ("mu2", &mut p.mu2),
        ("sigma2", &mut p.sigma2),
    ] {
        if let Some(v) = kv.take::<f64>(&format!("{prefix}{name}"))? {
            *slot = v;
        }
    }
    if let Some(seed) = kv.take::<u64>(&format!("{prefix}seed"))? {
        p.seed = seed;
    }
    Ok(p)
}

pub fn put_degradation(w: &mut KvWriter, prefix: &str, p: &DegradationProfile, with_seed: bool) {
    for (name, v) in [
        ("m", p.m),
        ("mu1", p.mu1),
        ("sigma1", p.sigma1),
        ("sigma_x", p.sigma_x),
        ("sigma_y", p.sigma_y),
        ("mu2", p.mu2),
        ("sigma2", p.sigma2),
    ] {
        w.put(&format!("{prefix}{name}"), v);
    }
    if with_seed {
        w.put(&format!("{prefix}seed"), p.seed);
    }
}

pub fn read_degradation(path: &Path) -> Result<DegradationProfile> {
    let mut kv = KeyValues::load(path)?;
    let p = degradation_from_kv(&mut kv, "", DegradationProfile::identity()).map_err(|e| e.at(path))?;
    kv.finish().map_err(|e| e.at(path))?;
    p.validate().map_err(|e| CliError::data(e).at(path))?;
    Ok(p)
}

pub fn degradation_text(p: &DegradationProfile) -> String {
    let mut w = KvWriter::new();
    put_degradation(&mut w, "", p, true);
    w.finish()
}

/// `low`, `high` or `identity`.
pub fn degradation_preset(name: &str, seed: u64) -> Result<DegradationProfile> {
    match name {
        "low" => Ok(DegradationProfile::low(seed)),
        "high" => Ok(DegradationProfile::high(seed)),
        "identity" | "none" => Ok(DegradationProfile { seed, ..DegradationProfile::identity() }),
        other => Err(CliError::config(format!("unknown degradation preset {other:?} (low, high, identity)"))),
    }
}
