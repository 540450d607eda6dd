use std::fmt::Write as _;
use std::path::PathBuf;

use gyroprior_core::bench::{learn_parameters, Sequence};
use gyroprior_core::tracker::TrackerVariant;

use super::out_dir;
use crate::config::{require_exists, RunConfig};
use crate::error::{CliError, Result};
use crate::frames::DiskSequence;
use crate::fsio::{create_dir, write_text};
use crate::tables::write_table;

/// Grid searched when `--grid` is not given. Brackets the default weights
/// of both penalized variants.
pub const DEFAULT_GRID: [f64; 6] = [0.0, 0.0025, 0.005, 0.0125, 0.025, 0.05];

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let grid: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::config(format!("--grid {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(CliError::config("--grid is empty"));
    }
    Ok(grid)
}

/// Every training directory must be laid out like `synth` output.
pub fn run(cfg: &RunConfig, variant_given: bool, training: &[PathBuf], grid: Option<&str>) -> Result<()> {
    let grid = match grid {
        Some(g) => parse_grid(g)?,
        None => DEFAULT_GRID.to_vec(),
    };
    let variants: Vec<TrackerVariant> = if variant_given { vec![cfg.variant] } else { TrackerVariant::ALL.to_vec() };
    let inputs: Vec<&std::path::Path> = training.iter().map(PathBuf::as_path).collect();
    for t in &inputs {
        require_exists(t, "--training")?;
    }
    let out = out_dir(cfg, &inputs)?;
    let sequences: Vec<DiskSequence> = inputs.iter().map(|d| DiskSequence::open_dir(d, cfg.fps)).collect::<Result<_>>()?;
    if variants.iter().any(|v| v.uses_gyro()) {
        if let Some(i) = sequences.iter().position(|s| s.gyro.is_none() || s.calibration.is_none()) {
            return Err(CliError::config(format!("{}: gyro variants need gyro.csv and calib.txt", inputs[i].display())));
        }
    }
    let refs: Vec<&dyn Sequence> = sequences.iter().map(|s| s as &dyn Sequence).collect();
    let learned = learn_parameters(&variants, &refs, &grid, |v| cfg.tracker_config(v), cfg.loss_radius)?;

    let mut text = String::new();
    let _ = writeln!(text, "{} training sequences, loss radius {} px", refs.len(), cfg.loss_radius);
    let _ = writeln!(text, "{:<20} {:>10} {:>12}", "tracker", "lambda", "mean length");
    for l in &learned {
        let _ = writeln!(text, "{:<20} {:>10} {:>12.2}", l.variant, l.lambda, l.score);
    }
    create_dir(&out)?;
    write_table(
        &out.join("learned.csv"),
        &["tracker", "lambda", "mean_track_length"],
        learned.iter().map(|l| vec![l.variant.to_string(), l.lambda.to_string(), format!("{:.4}", l.score)]).collect(),
    )?;
    write_text(&out.join("learned.txt"), &text)?;
    print!("{text}");
    Ok(())
}
