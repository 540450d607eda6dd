//! Command-line definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gyroprior_core::tracker::TrackerVariant;

use crate::commands;
use crate::config::{Overrides, RunConfig};
use crate::error::Result;
use crate::scene::SceneKind;

#[derive(Debug, Parser)]
#[command(name = "gyroprior", version, about = "Gyro-regularized feature tracking tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Each overrides the matching key of
/// `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Run configuration file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of frame_NNNNNN.pgm files, with optional timestamps.csv.
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Gyro CSV (`t,rx,ry,rz`).
    #[arg(long)]
    pub gyro: Option<PathBuf>,
    /// Calibration profile file.
    #[arg(long)]
    pub calib: Option<PathBuf>,
    /// Ground-truth CSV (`frame,feature_id,x,y`).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// descent-plain, descent-gyro-init, descent-gyro-prior or multi-gyro-prior.
    #[arg(long)]
    pub variant: Option<TrackerVariant>,
    /// Gyro penalty weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Common {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            frames: self.frames.clone(),
            gyro: self.gyro.clone(),
            calib: self.calib.clone(),
            truth: self.truth.clone(),
            out: self.out.clone(),
            variant: self.variant,
            lambda: self.lambda,
            seed: self.seed,
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        RunConfig::resolve(self.config.as_deref(), &self.overrides())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track features through a frame sequence and write trajectories.
    Track {
        #[command(flatten)]
        common: Common,
        /// Features detected in the first frame (ignored with --truth).
        #[arg(long)]
        max_features: Option<usize>,
        /// Minimum distance between detected features, pixels.
        #[arg(long)]
        min_spacing: Option<f64>,
    },
    /// Frame-to-frame homographies predicted from the gyro.
    PredictFlow {
        #[command(flatten)]
        common: Common,
        /// Points (`feature_id,x,y`) in frame 0 to carry through the predictions.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Solve for the combined intrinsics/mounting matrix from measured homographies.
    CalibrateKmat {
        #[command(flatten)]
        common: Common,
        /// Measured frame-to-frame homographies (`frame,h00,...,h22`).
        #[arg(long)]
        homographies: PathBuf,
    },
    /// Camera-to-gyro latency by cross-correlating flow with rotation rate.
    EstimateLatency {
        #[command(flatten)]
        common: Common,
        /// Trajectory or ground-truth CSV providing the image flow.
        #[arg(long)]
        trajectory: PathBuf,
        /// Largest lag searched, seconds.
        #[arg(long, default_value_t = 0.2)]
        max_lag: f64,
    },
    /// Estimate the gyro bias over a still window and subtract it.
    Debias {
        #[command(flatten)]
        common: Common,
        /// Still window `t0,t1` in gyro seconds. Defaults to the first second.
        #[arg(long)]
        window: Option<String>,
    },
    /// Apply the synthetic degradation pipeline to a frame sequence.
    Degrade {
        #[command(flatten)]
        common: Common,
        /// Degradation profile file.
        #[arg(long, conflicts_with = "preset")]
        profile: Option<PathBuf>,
        /// low, high or identity.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Render a synthetic rotating-camera sequence with gyro data and ground truth.
    Synth {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Score tracker variants (or a trajectory file) against ground truth.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Score this trajectory file instead of running trackers.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Loss radius, pixels.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Exhaustive penalty-weight search over training sequences.
    Learn {
        #[command(flatten)]
        common: Common,
        /// Sequence directory laid out like `synth` output. Repeatable.
        #[arg(long, required = true)]
        training: Vec<PathBuf>,
        /// Comma-separated penalty weights.
        #[arg(long)]
        grid: Option<String>,
        /// Loss radius, pixels.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Draw trajectories and ground truth over the frames as PPM images.
    Overlay {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trajectory: PathBuf,
    },
}

/// Scene flags for `synth`, each overriding the `scene.*` config keys.
#[derive(Debug, Clone, Default, Args)]
pub struct SceneArgs {
    /// checker, noise, ridges or corners.
    #[arg(long)]
    pub scene: Option<SceneKind>,
    /// Number of frames.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Maximum number of features.
    #[arg(long)]
    pub features: Option<usize>,
    /// Pan/tilt rate amplitude, rad/s.
    #[arg(long)]
    pub wobble: Option<f64>,
    /// Roll rate amplitude, rad/s.
    #[arg(long)]
    pub roll: Option<f64>,
    /// Gyro clock minus camera clock, seconds.
    #[arg(long, allow_hyphen_values = true)]
    pub latency: Option<f64>,
    /// Constant gyro offset `x,y,z`, rad/s.
    #[arg(long, allow_hyphen_values = true)]
    pub gyro_bias: Option<String>,
    /// Sideways slide of corner sprites, pixels/frame.
    #[arg(long)]
    pub drift: Option<f64>,
    /// none, low or high.
    #[arg(long)]
    pub degrade: Option<String>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Track { common, max_features, min_spacing } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = max_features {
                cfg.max_features = n;
            }
            if let Some(s) = min_spacing {
                cfg.min_spacing = s;
            }
            commands::track::run(&cfg)
        }
        Command::PredictFlow { common, points } => commands::gyro::predict_flow(&common.resolve()?, points.as_deref()),
        Command::CalibrateKmat { common, homographies } => {
            commands::gyro::calibrate_kmat(&common.resolve()?, &homographies)
        }
        Command::EstimateLatency { common, trajectory, max_lag } => {
            commands::gyro::estimate_latency(&common.resolve()?, &trajectory, max_lag)
        }
        Command::Debias { common, window } => commands::gyro::debias(&common.resolve()?, window.as_deref()),
        Command::Degrade { common, profile, preset } => {
            commands::degrade::run(&common.resolve()?, profile.as_deref(), preset.as_deref(), common.seed)
        }
        Command::Synth { common, scene } => commands::synth::run(&common.resolve()?, &scene),
        Command::Eval { common, trajectory, radius } => {
            let mut cfg = common.resolve()?;
            if let Some(r) = radius {
                cfg.loss_radius = r;
            }
            cfg.validate()?;
            commands::eval::run(&cfg, common.variant.is_some(), trajectory.as_deref())
        }
        Command::Learn { common, training, grid, radius } => {
            let mut cfg = common.resolve()?;
            if let Some(r) = radius {
                cfg.loss_radius = r;
            }
            cfg.validate()?;
            commands::learn::run(&cfg, common.variant.is_some(), &training, grid.as_deref())
        }
        Command::Overlay { common, trajectory } => commands::overlay::run(&common.resolve()?, &trajectory),
    }
}
