//! Feature lifecycle and the tracker variants.
//!
//! Each frame, features are moved to an initial guess (the global coarse
//! registration shift, or the gyro-predicted position), refined by descent on
//! the variant's energy over four pyramid levels, terminated if their template
//! leaves the frame, and periodically given fresh templates.

mod detect;
mod objective;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::energy::EnergyConfig;
use crate::gyro::{gyro_homography, CalibrationProfile, GyroStream, Homography};
use crate::imaging::{
    build_pyramid, extract_patch, register_coarse, GrayFrame, Patch, Pyramid,
    DEFAULT_SEARCH_RADIUS, PYRAMID_LEVELS,
};
use crate::optimize::{coarse_to_fine, descend, DescentConfig};
use crate::{Error, Result, Vec2};

pub use detect::{detect_features, min_eigenvalue_map};
use objective::{MultiObjective, SingleObjective};

/// Which energy, initialization and search direction a tracker uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackerVariant {
    /// Average-flow initialization, template energy only.
    DescentPlain,
    /// Gyro initialization, template energy only.
    DescentGyroInit,
    /// Gyro initialization, template energy plus gyro penalty.
    DescentGyroPrior,
    /// Joint descent over all features with the blended multi-feature
    /// direction, gyro initialization and penalties.
    MultiGyroPrior,
}

impl TrackerVariant {
    pub const ALL: [TrackerVariant; 4] = [
        TrackerVariant::DescentPlain,
        TrackerVariant::DescentGyroInit,
        TrackerVariant::DescentGyroPrior,
        TrackerVariant::MultiGyroPrior,
    ];

    pub fn uses_gyro(self) -> bool {
        !matches!(self, TrackerVariant::DescentPlain)
    }

    pub fn uses_penalty(self) -> bool {
        matches!(self, TrackerVariant::DescentGyroPrior | TrackerVariant::MultiGyroPrior)
    }

    pub fn name(self) -> &'static str {
        match self {
            TrackerVariant::DescentPlain => "descent-plain",
            TrackerVariant::DescentGyroInit => "descent-gyro-init",
            TrackerVariant::DescentGyroPrior => "descent-gyro-prior",
            TrackerVariant::MultiGyroPrior => "multi-gyro-prior",
        }
    }
}

impl fmt::Display for TrackerVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrackerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TrackerVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or(Error::Config("unknown tracker variant"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    pub variant: TrackerVariant,
    pub energy: EnergyConfig,
    pub descent: DescentConfig,
    /// Templates are re-extracted every this many tracked frames.
    pub refresh_period: usize,
    /// Coarse registration search radius, quarter-resolution pixels.
    pub search_radius: usize,
}

impl TrackerConfig {
    pub fn new(variant: TrackerVariant) -> Self {
        let mut energy = EnergyConfig::default();
        if variant == TrackerVariant::MultiGyroPrior {
            energy.penalty.lambda = 0.005;
        }
        Self {
            variant,
            energy,
            descent: DescentConfig::default(),
            refresh_period: 5,
            search_radius: DEFAULT_SEARCH_RADIUS,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.energy.penalty.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.refresh_period == 0 {
            return Err(Error::Config("refresh period must be positive"));
        }
        self.energy.validate()?;
        self.descent.validate()
    }

    /// Energy configuration actually minimized: the penalty is switched off
    /// for variants without a gyro prior.
    fn effective_energy(&self) -> EnergyConfig {
        let mut e = self.energy;
        if !self.variant.uses_penalty() {
            e.penalty.lambda = 0.0;
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureStatus {
    Active,
    /// The template grid left the frame.
    LostBoundary,
    /// The gyro homography sent the feature to infinity.
    LostDegenerate,
}

impl FeatureStatus {
    pub fn name(self) -> &'static str {
        match self {
            FeatureStatus::Active => "active",
            FeatureStatus::LostBoundary => "lost-boundary",
            FeatureStatus::LostDegenerate => "lost-degenerate",
        }
    }
}

impl FromStr for FeatureStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "active" => Ok(FeatureStatus::Active),
            "lost-boundary" => Ok(FeatureStatus::LostBoundary),
            "lost-degenerate" => Ok(FeatureStatus::LostDegenerate),
            _ => Err(Error::Data("unknown feature status")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub id: u64,
    /// Full-resolution position.
    pub position: Vec2,
    /// Gyro-predicted position for the current frame, if any.
    pub x_gyro: Option<Vec2>,
    pub status: FeatureStatus,
    pub birth_frame: u64,
    /// One template per pyramid level, level 0 first.
    templates: Vec<Patch>,
    since_refresh: usize,
}

impl Feature {
    pub fn templates(&self) -> &[Patch] {
        &self.templates
    }
}

/// Position and status of one feature after a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureUpdate {
    pub id: u64,
    pub position: Vec2,
    pub status: FeatureStatus,
}

/// Stateful tracker over a frame sequence.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    calibration: Option<CalibrationProfile>,
    features: Vec<Feature>,
    next_id: u64,
    prev: Option<Pyramid>,
}

impl Tracker {
    /// Gyro variants need a calibration profile.
    pub fn new(config: TrackerConfig, calibration: Option<CalibrationProfile>) -> Result<Self> {
        config.validate()?;
        if config.variant.uses_gyro() && calibration.is_none() {
            return Err(Error::Config("gyro tracker variants need a calibration profile"));
        }
        Ok(Self { config, calibration, features: Vec::new(), next_id: 0, prev: None })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Sets the first frame. Existing features are dropped.
    pub fn start(&mut self, frame: &GrayFrame) -> Result<()> {
        self.prev = Some(build_pyramid(frame)?);
        self.features.clear();
        Ok(())
    }

    /// Active features.
    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, id: u64) -> Option<&Feature> {
        self.features.iter().find(|f| f.id == id)
    }

    fn last_pyramid(&self) -> Result<&Pyramid> {
        self.prev.as_ref().ok_or(Error::Config("tracker has no frame yet; call start first"))
    }

    /// Adds a feature at `position` in the latest frame with a fresh id.
    pub fn add_feature(&mut self, position: Vec2) -> Result<u64> {
        let id = self.next_id;
        self.add_feature_with_id(id, position)?;
        Ok(id)
    }

    /// Adds a feature under a caller-chosen id, which must not have been used
    /// before in this run.
    pub fn add_feature_with_id(&mut self, id: u64, position: Vec2) -> Result<()> {
        if id < self.next_id && self.features.iter().any(|f| f.id == id) {
            return Err(Error::Data("feature id already in use"));
        }
        let pyr = self.last_pyramid()?;
        let templates = extract_templates(pyr, position, self.config.energy.template_size)?;
        let birth_frame = pyr.base().frame_index;
        self.features.push(Feature {
            id,
            position,
            x_gyro: None,
            status: FeatureStatus::Active,
            birth_frame,
            templates,
            since_refresh: 0,
        });
        self.next_id = self.next_id.max(id + 1);
        Ok(())
    }

    /// Moves an existing feature to `position` in the latest frame and
    /// re-extracts its templates there. Adds it if it is not tracked.
    pub fn reset_feature(&mut self, id: u64, position: Vec2) -> Result<()> {
        let pyr = self.last_pyramid()?;
        let templates = extract_templates(pyr, position, self.config.energy.template_size)?;
        let birth_frame = pyr.base().frame_index;
        match self.features.iter_mut().find(|f| f.id == id) {
            Some(f) => {
                f.position = position;
                f.templates = templates;
                f.since_refresh = 0;
                f.status = FeatureStatus::Active;
                f.x_gyro = None;
            }
            None => {
                self.features.push(Feature {
                    id,
                    position,
                    x_gyro: None,
                    status: FeatureStatus::Active,
                    birth_frame,
                    templates,
                    since_refresh: 0,
                });
                self.next_id = self.next_id.max(id + 1);
            }
        }
        Ok(())
    }

    pub fn remove_feature(&mut self, id: u64) {
        self.features.retain(|f| f.id != id);
    }

    /// Tracks every active feature into `frame`.
    ///
    /// Gyro variants integrate `gyro` between the previous and current frame
    /// timestamps (shifted onto the gyro clock by the calibrated latency).
    /// Returns one update per feature processed; features lost in this frame
    /// are reported once and then dropped.
    pub fn track_frame(
        &mut self,
        frame: &GrayFrame,
        gyro: Option<&GyroStream>,
    ) -> Result<Vec<FeatureUpdate>> {
        let cur = build_pyramid(frame)?;
        let prev = self.prev.take().ok_or(Error::Config("tracker has no frame yet; call start first"))?;
        let result = self.track_between(&prev, &cur, gyro);
        self.prev = Some(if result.is_ok() { cur } else { prev });
        result
    }

    fn track_between(
        &mut self,
        prev: &Pyramid,
        cur: &Pyramid,
        gyro: Option<&GyroStream>,
    ) -> Result<Vec<FeatureUpdate>> {
        let variant = self.config.variant;
        if prev.base().width() != cur.base().width() || prev.base().height() != cur.base().height() {
            return Err(Error::Dimension {
                width: cur.base().width(),
                height: cur.base().height(),
                reason: "frame size changed mid-sequence",
            });
        }

        let homography = if variant.uses_gyro() {
            let stream = gyro.ok_or(Error::Config("gyro tracker variants need gyro data"))?;
            let cal = self.calibration.as_ref().expect("checked in Tracker::new");
            Some(gyro_homography(stream, cal, prev.base().timestamp, cur.base().timestamp)?)
        } else {
            None
        };

        match homography {
            Some(h) => init_features_gyro(&mut self.features, &h),
            None => {
                let a = register_coarse(prev, cur, self.config.search_radius)?;
                init_features_average_flow(&mut self.features, a);
            }
        }

        let energy = self.config.effective_energy();
        match variant {
            TrackerVariant::MultiGyroPrior => self.minimize_joint(cur, &energy)?,
            _ => self.minimize_each(cur, &energy)?,
        }

        let n = self.config.energy.template_size;
        let period = self.config.refresh_period;
        for f in self.features.iter_mut().filter(|f| f.status == FeatureStatus::Active) {
            if !templates_fit(cur, f.position, n) {
                f.status = FeatureStatus::LostBoundary;
                continue;
            }
            f.since_refresh += 1;
            if f.since_refresh >= period {
                match extract_templates(cur, f.position, n) {
                    Ok(t) => {
                        f.templates = t;
                        f.since_refresh = 0;
                    }
                    Err(_) => f.status = FeatureStatus::LostBoundary,
                }
            }
        }

        let updates =
            self.features.iter().map(|f| FeatureUpdate { id: f.id, position: f.position, status: f.status }).collect();
        self.features.retain(|f| f.status == FeatureStatus::Active);
        Ok(updates)
    }

    fn minimize_each(&mut self, cur: &Pyramid, energy: &EnergyConfig) -> Result<()> {
        let descent = self.config.descent;
        for f in self.features.iter_mut().filter(|f| f.status == FeatureStatus::Active) {
            let result = coarse_to_fine(&[f.position.x, f.position.y], PYRAMID_LEVELS, |level, p| {
                let mut obj = SingleObjective {
                    template: &f.templates[level],
                    frame: cur.level(level),
                    x_gyro: f.x_gyro,
                    scale: Pyramid::scale(level),
                    cfg: energy,
                };
                descend(&mut obj, &p, &descent.at_level(level, PYRAMID_LEVELS))
            });
            match result {
                Ok(p) => f.position = Vec2::new(p[0], p[1]),
                Err(e) => match e.error {
                    Error::Boundary { .. } => f.status = FeatureStatus::LostBoundary,
                    other => return Err(other),
                },
            }
        }
        Ok(())
    }

    fn minimize_joint(&mut self, cur: &Pyramid, energy: &EnergyConfig) -> Result<()> {
        let descent = self.config.descent;
        loop {
            let active: Vec<usize> = (0..self.features.len())
                .filter(|&i| self.features[i].status == FeatureStatus::Active)
                .collect();
            if active.is_empty() {
                return Ok(());
            }
            let x0: Vec<f64> = active
                .iter()
                .flat_map(|&i| [self.features[i].position.x, self.features[i].position.y])
                .collect();
            let targets: Vec<Option<Vec2>> = active.iter().map(|&i| self.features[i].x_gyro).collect();
            let templates: Vec<Vec<Patch>> = (0..PYRAMID_LEVELS)
                .map(|level| active.iter().map(|&i| self.features[i].templates[level].clone()).collect())
                .collect();
            let result = coarse_to_fine(&x0, PYRAMID_LEVELS, |level, p| {
                let mut obj = MultiObjective {
                    templates: &templates[level],
                    frame: cur.level(level),
                    targets: &targets,
                    scale: Pyramid::scale(level),
                    cfg: energy,
                };
                descend(&mut obj, &p, &descent.at_level(level, PYRAMID_LEVELS))
            });
            match result {
                Ok(p) => {
                    for (k, &i) in active.iter().enumerate() {
                        self.features[i].position = Vec2::new(p[2 * k], p[2 * k + 1]);
                    }
                    return Ok(());
                }
                Err(e) => match e.error {
                    Error::Boundary { feature: Some(k) } => {
                        self.features[active[k]].status = FeatureStatus::LostBoundary;
                    }
                    other => return Err(other),
                },
            }
        }
    }
}

/// Adds the global displacement `a` to every active feature.
pub fn init_features_average_flow(features: &mut [Feature], a: Vec2) {
    for f in features.iter_mut().filter(|f| f.status == FeatureStatus::Active) {
        f.position += a;
        f.x_gyro = None;
    }
}

/// Moves every active feature to its gyro-predicted position and records that
/// position as the penalty target. Features sent to infinity are flagged
/// [`FeatureStatus::LostDegenerate`].
pub fn init_features_gyro(features: &mut [Feature], h: &Homography) {
    for f in features.iter_mut().filter(|f| f.status == FeatureStatus::Active) {
        match h.apply(f.position) {
            Some(p) => {
                f.position = p;
                f.x_gyro = Some(p);
            }
            None => {
                f.x_gyro = None;
                f.status = FeatureStatus::LostDegenerate;
            }
        }
    }
}

/// Whether templates of size `n` centred on `position` fit at every level.
pub fn templates_fit(pyr: &Pyramid, position: Vec2, n: usize) -> bool {
    let half = ((n - 1) / 2) as f64;
    (0..PYRAMID_LEVELS).all(|k| {
        let s = Pyramid::scale(k);
        let p = position / s;
        let l = pyr.level(k);
        p.x - half >= 0.0
            && p.y - half >= 0.0
            && p.x + half <= (l.width() - 1) as f64
            && p.y + half <= (l.height() - 1) as f64
    })
}

fn extract_templates(pyr: &Pyramid, position: Vec2, n: usize) -> Result<Vec<Patch>> {
    (0..PYRAMID_LEVELS)
        .map(|k| extract_patch(pyr.level(k), position / Pyramid::scale(k), n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gyro::GyroSample;
    use crate::math;
    use alloc::vec;

    const W: usize = 640;
    const H: usize = 480;
    const MARGIN: usize = 64;

    /// Random Gaussian blobs on a canvas larger than the frame.
    fn canvas() -> GrayFrame {
        let (cw, ch) = (W + 2 * MARGIN, H + 2 * MARGIN);
        let mut data = vec![128.0; cw * ch];
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1100 {
            let (cx, cy) = (next() * cw as f64, next() * ch as f64);
            let s = 3.0 + 6.0 * next();
            let a = 160.0 * (next() - 0.5);
            let r = 4.0 * s;
            let x0 = math::floor(cx - r).max(0.0) as usize;
            let y0 = math::floor(cy - r).max(0.0) as usize;
            let x1 = (math::ceil(cx + r) as usize).min(cw - 1);
            let y1 = (math::ceil(cy + r) as usize).min(ch - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    data[y * cw + x] += a * math::exp(-d2 / (2.0 * s * s));
                }
            }
        }
        GrayFrame::new(cw, ch, data).unwrap()
    }

    fn shifted(k: usize, shift: Vec2) -> GrayFrame {
        std::thread_local! {
            static CANVAS: GrayFrame = canvas();
        }
        let d = shift * k as f64;
        CANVAS.with(|c| {
            GrayFrame::from_fn(W, H, |x, y| {
                c.sample(Vec2::new(x as f64 + MARGIN as f64 - d.x, y as f64 + MARGIN as f64 - d.y)).unwrap()
            })
        })
        .with_time(k as u64, k as f64 / 30.0)
    }

    fn still_gyro(frames: usize) -> GyroStream {
        let n = frames * 14 + 20;
        GyroStream::new((0..n).map(|i| GyroSample::new(i as f64 / 400.0 - 0.02, 0.0, 0.0, 0.0)).collect())
            .unwrap()
    }

    fn starts() -> Vec<Vec2> {
        vec![Vec2::new(200.0, 180.0), Vec2::new(400.0, 240.0), Vec2::new(320.0, 300.0)]
    }

    fn run(cfg: TrackerConfig, frames: usize, shift: Vec2) -> Vec<Vec<FeatureUpdate>> {
        let cal = CalibrationProfile::pinhole(300.0, W as f64 / 2.0, H as f64 / 2.0).unwrap();
        let gyro = still_gyro(frames);
        let mut t = Tracker::new(cfg, Some(cal)).unwrap();
        t.start(&shifted(0, shift)).unwrap();
        for p in starts() {
            t.add_feature(p).unwrap();
        }
        (1..frames).map(|k| t.track_frame(&shifted(k, shift), Some(&gyro)).unwrap()).collect()
    }

    #[test]
    fn gyro_variant_without_calibration_is_rejected() {
        let err = Tracker::new(TrackerConfig::new(TrackerVariant::DescentGyroPrior), None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(Tracker::new(TrackerConfig::new(TrackerVariant::DescentPlain), None).is_ok());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in TrackerVariant::ALL {
            assert_eq!(v.name().parse::<TrackerVariant>().unwrap(), v);
        }
        assert!("lk".parse::<TrackerVariant>().is_err());
    }

    #[test]
    fn static_scene_stays_put() {
        for v in TrackerVariant::ALL {
            let out = run(TrackerConfig::new(v), 6, Vec2::zeros());
            for u in out.last().unwrap() {
                let p = starts()[u.id as usize];
                assert_eq!(u.status, FeatureStatus::Active);
                assert!((u.position - p).norm() < 0.1, "{v}: {:?} vs {p:?}", u.position);
            }
        }
    }

    #[test]
    fn plain_descent_follows_translation() {
        let shift = Vec2::new(1.3, 0.7);
        let out = run(TrackerConfig::new(TrackerVariant::DescentPlain), 30, shift);
        for (k, frame) in out.iter().enumerate() {
            assert_eq!(frame.len(), starts().len());
            for u in frame {
                assert_eq!(u.status, FeatureStatus::Active);
                let truth = starts()[u.id as usize] + shift * (k + 1) as f64;
                assert!((u.position - truth).norm() < 0.5, "frame {}: {:?} vs {truth:?}", k + 1, u.position);
            }
        }
    }

    #[test]
    fn zero_weight_prior_matches_gyro_init_exactly() {
        let shift = Vec2::new(0.8, 0.4);
        let a = run(TrackerConfig::new(TrackerVariant::DescentGyroInit), 8, shift);
        let b = run(TrackerConfig::new(TrackerVariant::DescentGyroPrior).with_lambda(0.0), 8, shift);
        assert_eq!(a, b);
    }

    #[test]
    fn joint_descent_with_one_feature_matches_single() {
        let cal = CalibrationProfile::pinhole(300.0, W as f64 / 2.0, H as f64 / 2.0).unwrap();
        let gyro = still_gyro(10);
        let shift = Vec2::new(0.9, 0.6);
        let mut single = Tracker::new(TrackerConfig::new(TrackerVariant::DescentGyroPrior).with_lambda(0.005), Some(cal)).unwrap();
        let mut multi = Tracker::new(TrackerConfig::new(TrackerVariant::MultiGyroPrior), Some(cal)).unwrap();
        for t in [&mut single, &mut multi] {
            t.start(&shifted(0, shift)).unwrap();
            t.add_feature(Vec2::new(300.0, 220.0)).unwrap();
        }
        for k in 1..10 {
            let f = shifted(k, shift);
            let a = single.track_frame(&f, Some(&gyro)).unwrap();
            let b = multi.track_frame(&f, Some(&gyro)).unwrap();
            assert!((a[0].position - b[0].position).norm() < 0.1, "frame {k}: {:?} {:?}", a[0], b[0]);
        }
    }

    #[test]
    fn feature_leaving_frame_is_reported_once_then_dropped() {
        let mut t = Tracker::new(TrackerConfig::new(TrackerVariant::DescentPlain), None).unwrap();
        let shift = Vec2::new(3.0, 0.0);
        t.start(&shifted(0, shift)).unwrap();
        let near_edge = t.add_feature(Vec2::new(W as f64 - 60.0, 240.0)).unwrap();
        let safe = t.add_feature(Vec2::new(200.0, 240.0)).unwrap();
        let mut lost_at = None;
        for k in 1..20 {
            let out = t.track_frame(&shifted(k, shift), None).unwrap();
            if let Some(u) = out.iter().find(|u| u.id == near_edge) {
                if u.status != FeatureStatus::Active {
                    assert_eq!(u.status, FeatureStatus::LostBoundary);
                    lost_at = Some(k);
                }
            } else {
                assert!(lost_at.is_some());
            }
        }
        assert!(lost_at.is_some());
        assert!(t.feature(near_edge).is_none());
        assert!(t.feature(safe).is_some());
    }

    #[test]
    fn degenerate_prediction_is_flagged() {
        let mut f = Feature {
            id: 0,
            position: Vec2::new(30.0, 0.0),
            x_gyro: None,
            status: FeatureStatus::Active,
            birth_frame: 0,
            templates: Vec::new(),
            since_refresh: 0,
        };
        let h = Homography::new(crate::Mat3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -0.1, 0.0, 2.0)).unwrap();
        init_features_gyro(core::slice::from_mut(&mut f), &h);
        assert_eq!(f.status, FeatureStatus::LostDegenerate);
    }

    #[test]
    fn features_need_room_for_every_level() {
        let mut t = Tracker::new(TrackerConfig::new(TrackerVariant::DescentPlain), None).unwrap();
        t.start(&shifted(0, Vec2::zeros())).unwrap();
        assert!(t.add_feature(Vec2::new(20.0, 240.0)).is_err());
        assert!(t.add_feature(Vec2::new(60.0, 240.0)).is_ok());
    }

    mod on_synthetic_scenes {
        use super::*;
        use crate::bench::{synth_sequence, FeatureSpec, MotionProfile, SceneSpec, Sequence, Texture};
        use crate::Vec3;

        fn wobble(pan: f64, roll: f64) -> MotionProfile {
            MotionProfile {
                constant: Vec3::zeros(),
                amplitude: Vec3::new(pan, pan, roll),
                frequency: Vec3::new(0.4, 0.3, 0.5),
                phase: Vec3::new(0.0, core::f64::consts::FRAC_PI_2, 0.3),
            }
        }

        fn camera() -> CalibrationProfile {
            CalibrationProfile::pinhole(700.0, 320.0, 240.0).unwrap()
        }

        #[test]
        fn gyro_initialization_lands_on_truth_under_pure_rotation() {
            let mut s = SceneSpec::new(640, 480, 20);
            s.layers.push(Texture::Checkerboard { cell: 30.0, contrast: 80.0, softness: 2.0 });
            s.features = (0..4).map(|i| FeatureSpec::at(Vec2::new(200.0 + 80.0 * i as f64, 200.0 + 20.0 * i as f64))).collect();
            s.motion = wobble(0.15, 0.3);
            let seq = synth_sequence(s, &camera()).unwrap();
            let cal = seq.calibration().unwrap();
            let tracks = seq.truth().tracks();
            assert!(tracks.iter().all(|t| t.lifespan() == seq.len() as u64));
            for k in 1..seq.len() as u64 {
                let h = gyro_homography(seq.gyro().unwrap(), cal, (k - 1) as f64 / 30.0, k as f64 / 30.0).unwrap();
                let mut features: Vec<Feature> = tracks
                    .iter()
                    .map(|t| Feature {
                        id: t.id,
                        position: t.at(k - 1).unwrap(),
                        x_gyro: None,
                        status: FeatureStatus::Active,
                        birth_frame: 0,
                        templates: Vec::new(),
                        since_refresh: 0,
                    })
                    .collect();
                init_features_gyro(&mut features, &h);
                for (f, t) in features.iter().zip(tracks) {
                    assert_eq!(f.x_gyro, Some(f.position));
                    assert!((f.position - t.at(k).unwrap()).norm() < 0.5);
                }
            }
        }

        /// Worst distance from the truth of one feature placed just off a
        /// thin line, or infinity if the tracker drops it.
        fn along_edge_error(variant: TrackerVariant, lambda: f64) -> f64 {
            let mut s = SceneSpec::new(640, 480, 31);
            let angle = 55f64.to_radians();
            let centre = Vec2::new(320.0, 240.0);
            s.layers.push(Texture::Line { point: centre, angle, width: 6.0, contrast: 80.0, softness: 1.5 });
            let normal = Vec2::new(math::cos(angle), math::sin(angle));
            let along = Vec2::new(-normal.y, normal.x);
            s.features = vec![FeatureSpec::at(centre + normal * 3.0 + along * 40.0)];
            s.motion = wobble(0.15, 0.1);
            let seq = synth_sequence(s, &camera()).unwrap();
            let truth = seq.truth().track(0).unwrap();
            assert_eq!(truth.lifespan(), seq.len() as u64);
            let mut tracker =
                Tracker::new(TrackerConfig::new(variant).with_lambda(lambda), seq.calibration().copied()).unwrap();
            tracker.start(&seq.frame(0).unwrap()).unwrap();
            tracker.add_feature_with_id(0, truth.at(0).unwrap()).unwrap();
            let mut worst: f64 = 0.0;
            for k in 1..seq.len() {
                let updates = tracker.track_frame(&seq.frame(k).unwrap(), seq.gyro()).unwrap();
                match updates.first() {
                    Some(u) if u.status == FeatureStatus::Active => {
                        worst = worst.max((u.position - truth.at(k as u64).unwrap()).norm())
                    }
                    _ => return f64::INFINITY,
                }
            }
            worst
        }

        #[test]
        fn prior_holds_an_edge_feature_that_plain_descent_lets_slide() {
            // The weight is scaled to 0-255 intensities; at the default weight
            // the penalty is too weak to matter on this scale.
            let lambda = 0.0125 * 255.0;
            let prior = along_edge_error(TrackerVariant::DescentGyroPrior, lambda);
            let plain = along_edge_error(TrackerVariant::DescentPlain, 0.0);
            assert!(prior < 2.0, "{prior}");
            assert!(plain > 2.0 * prior, "plain {plain}, prior {prior}");
        }
    }
}
