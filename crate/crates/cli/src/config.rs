//! Run configuration: one key/value file covering every command.

use std::path::{Path, PathBuf};

use gyroprior_core::bench::{DegradationProfile, DEFAULT_LOSS_RADIUS};
use gyroprior_core::energy::EnergyConfig;
use gyroprior_core::optimize::DescentConfig;
use gyroprior_core::tracker::{TrackerConfig, TrackerVariant};

use crate::error::{CliError, Result};
use crate::fsio::write_text;
use crate::kv::{KeyValues, KvWriter};
use crate::profiles::{degradation_from_kv, put_degradation};
use crate::scene::SceneConfig;

/// Input and output locations. Relative paths resolve against the working
/// directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Paths {
    pub frames: Option<PathBuf>,
    pub gyro: Option<PathBuf>,
    pub calib: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub paths: Paths,
    pub variant: TrackerVariant,
    /// Penalty weight; `None` keeps each variant's default.
    pub lambda: Option<f64>,
    /// Template and penalty shape settings. The penalty weight here is
    /// ignored in favour of `lambda`.
    pub energy: EnergyConfig,
    pub descent: DescentConfig,
    pub refresh_period: usize,
    pub search_radius: usize,
    pub max_features: usize,
    pub min_spacing: f64,
    pub loss_radius: f64,
    /// Frame rate assumed when a frame directory has no timestamps file.
    pub fps: f64,
    pub degradation: DegradationProfile,
    pub scene: SceneConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrackerConfig::new(TrackerVariant::DescentGyroPrior);
        Self {
            paths: Paths::default(),
            variant: t.variant,
            lambda: None,
            energy: t.energy,
            descent: t.descent,
            refresh_period: t.refresh_period,
            search_radius: t.search_radius,
            max_features: 100,
            min_spacing: 20.0,
            loss_radius: DEFAULT_LOSS_RADIUS,
            fps: 30.0,
            degradation: DegradationProfile::identity(),
            scene: SceneConfig::default(),
            seed: 0,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub frames: Option<PathBuf>,
    pub gyro: Option<PathBuf>,
    pub calib: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub variant: Option<TrackerVariant>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
}

macro_rules! take_into {
    ($kv:expr, $($key:literal => $slot:expr),+ $(,)?) => {
        $( if let Some(v) = $kv.take($key)? { $slot = v; } )+
    };
}

impl RunConfig {
    pub fn from_kv(kv: &mut KeyValues) -> Result<Self> {
        let mut c = Self::default();
        for (key, slot) in [
            ("paths.frames", &mut c.paths.frames),
            ("paths.gyro", &mut c.paths.gyro),
            ("paths.calib", &mut c.paths.calib),
            ("paths.truth", &mut c.paths.truth),
            ("paths.out", &mut c.paths.out),
        ] {
            *slot = kv.take::<PathBuf>(key)?;
        }
        c.lambda = kv.take("penalty.lambda")?;
        take_into!(kv,
            "tracker.variant" => c.variant,
            "tracker.refresh_period" => c.refresh_period,
            "tracker.search_radius" => c.search_radius,
            "tracker.template_size" => c.energy.template_size,
            "tracker.gradient_step" => c.energy.gradient_step,
            "penalty.alpha" => c.energy.penalty.alpha,
            "penalty.x_max" => c.energy.penalty.x_max,
            "descent.min_steps" => c.descent.min_steps,
            "descent.coarsest_min_steps" => c.descent.coarsest_min_steps,
            "descent.max_steps" => c.descent.max_steps,
            "descent.step_size" => c.descent.step_size,
            "descent.max_refinements" => c.descent.max_refinements,
            "descent.grad_eps" => c.descent.grad_eps,
            "descent.decay_ratio" => c.descent.decay_ratio,
            "detect.max_features" => c.max_features,
            "detect.min_spacing" => c.min_spacing,
            "eval.loss_radius" => c.loss_radius,
            "frames.fps" => c.fps,
            "seed" => c.seed,
            "scene.kind" => c.scene.kind,
            "scene.width" => c.scene.width,
            "scene.height" => c.scene.height,
            "scene.frames" => c.scene.frames,
            "scene.focal" => c.scene.focal,
            "scene.features" => c.scene.features,
            "scene.wobble" => c.scene.wobble,
            "scene.roll" => c.scene.roll,
            "scene.latency" => c.scene.latency,
            "scene.gyro_rate" => c.scene.gyro_rate,
            "scene.lead_in" => c.scene.lead_in,
            "scene.drift" => c.scene.drift,
            "scene.degrade" => c.scene.degrade,
        );
        if let Some(v) = kv.take_array::<3>("scene.rate")? {
            c.scene.rate = v;
        }
        if let Some(v) = kv.take_array::<3>("scene.gyro_bias")? {
            c.scene.gyro_bias = v;
        }
        c.degradation = degradation_from_kv(kv, "degrade.", c.degradation)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut kv = KeyValues::load(path).map_err(as_config)?;
        let mut c = Self::from_kv(&mut kv).map_err(|e| as_config(e.at(path)))?;
        kv.finish().map_err(|e| as_config(e.at(path)))?;
        c.degradation.seed = c.seed;
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut w = KvWriter::new();
        for (key, p) in [
            ("paths.frames", &self.paths.frames),
            ("paths.gyro", &self.paths.gyro),
            ("paths.calib", &self.paths.calib),
            ("paths.truth", &self.paths.truth),
            ("paths.out", &self.paths.out),
        ] {
            if let Some(p) = p {
                w.put(key, p.display());
            }
        }
        w.put("seed", self.seed).put("frames.fps", self.fps).blank();
        w.put("tracker.variant", self.variant)
            .put("tracker.refresh_period", self.refresh_period)
            .put("tracker.search_radius", self.search_radius)
            .put("tracker.template_size", self.energy.template_size)
            .put("tracker.gradient_step", self.energy.gradient_step);
        if let Some(l) = self.lambda {
            w.put("penalty.lambda", l);
        }
        w.put("penalty.alpha", self.energy.penalty.alpha).put("penalty.x_max", self.energy.penalty.x_max);
        let d = &self.descent;
        w.put("descent.min_steps", d.min_steps)
            .put("descent.coarsest_min_steps", d.coarsest_min_steps)
            .put("descent.max_steps", d.max_steps)
            .put("descent.step_size", d.step_size)
            .put("descent.max_refinements", d.max_refinements)
            .put("descent.grad_eps", d.grad_eps)
            .put("descent.decay_ratio", d.decay_ratio)
            .blank();
        w.put("detect.max_features", self.max_features)
            .put("detect.min_spacing", self.min_spacing)
            .put("eval.loss_radius", self.loss_radius)
            .blank();
        put_degradation(&mut w, "degrade.", &self.degradation, false);
        w.blank();
        let s = &self.scene;
        w.put("scene.kind", s.kind)
            .put("scene.width", s.width)
            .put("scene.height", s.height)
            .put("scene.frames", s.frames)
            .put("scene.focal", s.focal)
            .put("scene.features", s.features)
            .put("scene.wobble", s.wobble)
            .put("scene.roll", s.roll)
            .put_array("scene.rate", &s.rate)
            .put("scene.latency", s.latency)
            .put_array("scene.gyro_bias", &s.gyro_bias)
            .put("scene.gyro_rate", s.gyro_rate)
            .put("scene.lead_in", s.lead_in)
            .put("scene.drift", s.drift)
            .put("scene.degrade", &s.degrade);
        w.finish()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_text())
    }

    /// Defaults, then `--config`, then flags.
    pub fn resolve(config: Option<&Path>, o: &Overrides) -> Result<Self> {
        let mut c = match config {
            Some(p) => {
                require_exists(p, "--config")?;
                Self::load(p)?
            }
            None => Self::default(),
        };
        for (slot, v) in [
            (&mut c.paths.frames, &o.frames),
            (&mut c.paths.gyro, &o.gyro),
            (&mut c.paths.calib, &o.calib),
            (&mut c.paths.truth, &o.truth),
            (&mut c.paths.out, &o.out),
        ] {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        if let Some(v) = o.variant {
            c.variant = v;
        }
        if o.lambda.is_some() {
            c.lambda = o.lambda;
        }
        if let Some(s) = o.seed {
            c.seed = s;
        }
        c.degradation.seed = c.seed;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for v in TrackerVariant::ALL {
            self.tracker_config(v).validate().map_err(CliError::from)?;
        }
        self.degradation.validate()?;
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(CliError::config("frames.fps must be positive"));
        }
        if !(self.loss_radius.is_finite() && self.loss_radius > 0.0) {
            return Err(CliError::config("eval.loss_radius must be positive"));
        }
        if !(self.min_spacing >= 0.0) {
            return Err(CliError::config("detect.min_spacing must be non-negative"));
        }
        Ok(())
    }

    /// Tracker settings for `variant`, with `lambda` applied when set.
    pub fn tracker_config(&self, variant: TrackerVariant) -> TrackerConfig {
        let mut t = TrackerConfig::new(variant);
        let lambda = self.lambda.unwrap_or(t.energy.penalty.lambda);
        t.energy = self.energy;
        t.energy.penalty.lambda = lambda;
        t.descent = self.descent;
        t.refresh_period = self.refresh_period;
        t.search_radius = self.search_radius;
        t
    }

    /// The configured variant's tracker settings.
    pub fn tracker(&self) -> TrackerConfig {
        self.tracker_config(self.variant)
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.paths.out.as_deref().ok_or_else(|| CliError::config("--out is required"))
    }
}

/// Problems with the config file itself are config errors, whatever the
/// underlying parse failure.
fn as_config(e: CliError) -> CliError {
    match e {
        CliError::Data(m) | CliError::Processing(m) => CliError::Config(m),
        c => c,
    }
}

pub fn require_exists(path: &Path, flag: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::config(format!("{flag}: {} does not exist", path.display())))
    }
}

/// The path behind `flag`, which must be set and exist.
pub fn require_path<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    let p = p.as_deref().ok_or_else(|| CliError::config(format!("{flag} is required")))?;
    require_exists(p, flag)?;
    Ok(p)
}

/// Like [`require_path`] but the flag may be absent.
pub fn optional_path<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<Option<&'a Path>> {
    match p.as_deref() {
        None => Ok(None),
        Some(p) => require_exists(p, flag).map(|_| Some(p)),
    }
}
