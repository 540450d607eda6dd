//! One module per subcommand.

use std::path::{Path, PathBuf};

use gyroprior_core::gyro::{rotation_rate_summary, GyroStream};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub mod degrade;
pub mod eval;
pub mod gyro;
pub mod learn;
pub mod overlay;
pub mod synth;
pub mod track;

/// The output directory, which must not be one of the input directories.
pub(crate) fn out_dir(cfg: &RunConfig, input_dirs: &[&Path]) -> Result<PathBuf> {
    let out = cfg.out_dir()?.to_path_buf();
    if let Ok(o) = out.canonicalize() {
        if input_dirs.iter().any(|i| i.canonicalize().is_ok_and(|d| d == o)) {
            return Err(CliError::config(format!("--out {} is an input directory", out.display())));
        }
    }
    Ok(out)
}

/// Fails if writing `outputs` would replace any of `inputs`.
pub(crate) fn no_clobber(outputs: &[PathBuf], inputs: &[Option<&Path>]) -> Result<()> {
    for o in outputs {
        let Ok(oc) = o.canonicalize() else { continue };
        if inputs.iter().flatten().any(|i| i.canonicalize().is_ok_and(|ic| ic == oc)) {
            return Err(CliError::config(format!("output {} would overwrite an input", o.display())));
        }
    }
    Ok(())
}

/// One line of rotation-rate statistics in degrees per second.
pub(crate) fn rate_line(label: &str, g: &GyroStream) -> Result<String> {
    let s = rotation_rate_summary(g)?;
    Ok(format!("{label} rotation rate (deg/s): max {:.2}, mean {:.2}, median {:.2}", s.max, s.mean, s.median))
}
