//! Tracking energies and their gradients.
//!
//! The template term is the mean absolute difference between a feature's
//! template and the frame sampled around the candidate position. The gyro
//! penalty grows logarithmically with the distance from the gyro-predicted
//! position: it is zero at the prediction, equals `lambda` at `x_max`, and
//! levels off beyond, so a clearly visible feature can still overrule a wrong
//! prediction.
//!
//! Penalty distances are always measured in full-resolution pixels. The
//! `*_at_level` helpers take positions in level coordinates together with the
//! level scale `2^k` and apply the chain rule.

use alloc::vec;
use alloc::vec::Vec;

use crate::imaging::{for_each_grid_sample, GrayFrame, Patch};
use crate::math;
use crate::{Error, Result, Vec2};

/// Below this distance the penalty gradient is taken to be zero.
pub const PENALTY_KINK_EPS: f64 = 1e-8;

/// Shape and strength of the gyro penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    /// Overall strength; the penalty equals `lambda` at distance `x_max`.
    pub lambda: f64,
    /// "Pointiness" of the curve, 1/pixels.
    pub alpha: f64,
    /// Greatest expected deviation from the prediction, pixels.
    pub x_max: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self { lambda: 0.0125, alpha: 0.5, x_max: 25.0 }
    }
}

impl PenaltyConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self { lambda, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config("penalty lambda must be finite and >= 0"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config("penalty alpha must be > 0"));
        }
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::Config("penalty x_max must be > 0"));
        }
        Ok(())
    }

    fn normalizer(&self) -> f64 {
        math::ln_1p(self.alpha * self.x_max)
    }
}

/// Per-pixel dissimilarity between template and frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Loss {
    #[default]
    Absolute,
}

impl Loss {
    #[inline]
    fn eval(self, r: f64) -> f64 {
        match self {
            Loss::Absolute => r.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub loss: Loss,
    /// Template width and height `n` (odd).
    pub template_size: usize,
    pub penalty: PenaltyConfig,
    /// Perturbation `h` for central differences of the template term, in
    /// pixels of the level being solved.
    pub gradient_step: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            loss: Loss::Absolute,
            template_size: 13,
            penalty: PenaltyConfig::default(),
            gradient_step: 0.25,
        }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.template_size.is_multiple_of(2) {
            return Err(Error::Config("template size must be odd"));
        }
        if !(self.gradient_step > 0.0 && self.gradient_step.is_finite()) {
            return Err(Error::Config("gradient step must be > 0"));
        }
        self.penalty.validate()
    }
}

/// `(1/n²) Σ ψ(T(u) − I(u + x))` over the template grid.
pub fn template_energy(template: &Patch, frame: &GrayFrame, x: Vec2) -> Result<f64> {
    template_energy_with(Loss::Absolute, template, frame, x)
}

fn template_energy_with(loss: Loss, template: &Patch, frame: &GrayFrame, x: Vec2) -> Result<f64> {
    let half = template.half();
    if !frame.grid_in_bounds(x, half as f64) {
        return Err(Error::Boundary { feature: None });
    }
    let t = template.values();
    let mut sum = 0.0;
    for_each_grid_sample(frame, x, half, |k, v| sum += loss.eval(t[k] - v));
    Ok(sum / t.len() as f64)
}

/// `lambda ln(alpha |x − x_gyro| + 1) / ln(alpha x_max + 1)`.
pub fn penalty(x: Vec2, x_gyro: Vec2, cfg: &PenaltyConfig) -> f64 {
    let d = math::hypot(x.x - x_gyro.x, x.y - x_gyro.y);
    cfg.lambda * (math::ln_1p(cfg.alpha * d) / cfg.normalizer())
}

/// Analytic gradient of [`penalty`] with respect to `x`:
/// `lambda alpha (x − x_gyro) / (ln(alpha x_max + 1) (alpha N + 1) N)`.
/// Zero when `N < 1e-8`, where the penalty has a kink.
pub fn penalty_gradient(x: Vec2, x_gyro: Vec2, cfg: &PenaltyConfig) -> Vec2 {
    let d = x - x_gyro;
    let n = math::hypot(d.x, d.y);
    if n < PENALTY_KINK_EPS {
        return Vec2::zeros();
    }
    d * (cfg.lambda * cfg.alpha / (cfg.normalizer() * (cfg.alpha * n + 1.0) * n))
}

/// Template energy plus gyro penalty.
pub fn regularized_single_energy(
    template: &Patch,
    frame: &GrayFrame,
    x: Vec2,
    x_gyro: Vec2,
    cfg: &EnergyConfig,
) -> Result<f64> {
    single_energy_at_level(template, frame, x, Some(x_gyro), 1.0, cfg)
}

/// Regularized single-feature energy for level coordinates `x`; the penalty
/// is evaluated at `scale * x` against the full-resolution `x_gyro`.
/// Without a prediction, or with `lambda = 0`, only the template term remains.
pub fn single_energy_at_level(
    template: &Patch,
    frame: &GrayFrame,
    x: Vec2,
    x_gyro: Option<Vec2>,
    scale: f64,
    cfg: &EnergyConfig,
) -> Result<f64> {
    let mut e = template_energy_with(cfg.loss, template, frame, x)?;
    if let Some(g) = x_gyro {
        if cfg.penalty.lambda != 0.0 {
            e += penalty(x * scale, g, &cfg.penalty);
        }
    }
    Ok(e)
}

/// Gradient of [`single_energy_at_level`]: central differences with step
/// `cfg.gradient_step` for the template term, analytic penalty gradient.
pub fn single_gradient_at_level(
    template: &Patch,
    frame: &GrayFrame,
    x: Vec2,
    x_gyro: Option<Vec2>,
    scale: f64,
    cfg: &EnergyConfig,
) -> Result<Vec2> {
    let mut g = template_gradient(cfg, template, frame, x)?;
    if let Some(target) = x_gyro {
        if cfg.penalty.lambda != 0.0 {
            g += penalty_gradient(x * scale, target, &cfg.penalty) * scale;
        }
    }
    Ok(g)
}

fn template_gradient(cfg: &EnergyConfig, template: &Patch, frame: &GrayFrame, x: Vec2) -> Result<Vec2> {
    let h = cfg.gradient_step;
    let e = |p: Vec2| template_energy_with(cfg.loss, template, frame, p);
    let dx = (e(x + Vec2::new(h, 0.0))? - e(x - Vec2::new(h, 0.0))?) / (2.0 * h);
    let dy = (e(x + Vec2::new(0.0, h))? - e(x - Vec2::new(0.0, h))?) / (2.0 * h);
    Ok(Vec2::new(dx, dy))
}

/// Stacked positions of `F` features and their gyro-predicted targets.
/// Feature `f` (0-based) occupies elements `2f` and `2f + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiState {
    pub x: Vec<f64>,
    pub gyro_targets: Vec<f64>,
}

impl MultiState {
    pub fn new(x: Vec<f64>, gyro_targets: Vec<f64>) -> Result<Self> {
        if !x.len().is_multiple_of(2) || x.len() != gyro_targets.len() {
            return Err(Error::Data("state and targets must both hold 2F values"));
        }
        Ok(Self { x, gyro_targets })
    }

    pub fn from_points(positions: &[Vec2], targets: &[Vec2]) -> Result<Self> {
        Self::new(flatten(positions), flatten(targets))
    }

    pub fn feature_count(&self) -> usize {
        self.x.len() / 2
    }

    pub fn position(&self, f: usize) -> Vec2 {
        Vec2::new(self.x[2 * f], self.x[2 * f + 1])
    }

    pub fn target(&self, f: usize) -> Vec2 {
        Vec2::new(self.gyro_targets[2 * f], self.gyro_targets[2 * f + 1])
    }
}

pub(crate) fn flatten(points: &[Vec2]) -> Vec<f64> {
    points.iter().flat_map(|p| [p.x, p.y]).collect()
}

/// Additional joint term, such as a coupling penalty between features, added
/// to the multi-feature energy together with its gradient.
pub trait CouplingTerm {
    fn value(&self, x: &[f64]) -> f64;
    /// Adds the gradient at `x` into `grad`.
    fn add_gradient(&self, x: &[f64], grad: &mut [f64]);
}

/// Sum over features of template terms and gyro penalties, plus the optional
/// coupling term. Boundary errors name the offending feature index.
pub fn regularized_multi_energy(
    templates: &[Patch],
    frame: &GrayFrame,
    state: &MultiState,
    cfg: &EnergyConfig,
    coupling: Option<&dyn CouplingTerm>,
) -> Result<f64> {
    let targets = targets_of(state);
    multi_energy_at_level(templates, frame, &state.x, &targets, 1.0, cfg, coupling)
}

/// Gradient of [`regularized_multi_energy`]; see [`single_gradient_at_level`].
pub fn multi_energy_gradient(
    templates: &[Patch],
    frame: &GrayFrame,
    state: &MultiState,
    cfg: &EnergyConfig,
    coupling: Option<&dyn CouplingTerm>,
) -> Result<Vec<f64>> {
    let targets = targets_of(state);
    multi_gradient_at_level(templates, frame, &state.x, &targets, 1.0, cfg, coupling)
}

fn targets_of(state: &MultiState) -> Vec<Option<Vec2>> {
    (0..state.feature_count()).map(|f| Some(state.target(f))).collect()
}

fn check_multi(templates: &[Patch], x: &[f64], targets: &[Option<Vec2>]) -> Result<()> {
    if x.len() != 2 * templates.len() || targets.len() != templates.len() {
        return Err(Error::Data("templates, positions and targets disagree on feature count"));
    }
    Ok(())
}

/// Level-coordinate form of [`regularized_multi_energy`]. Terms are summed in
/// feature order.
pub fn multi_energy_at_level(
    templates: &[Patch],
    frame: &GrayFrame,
    x: &[f64],
    targets: &[Option<Vec2>],
    scale: f64,
    cfg: &EnergyConfig,
    coupling: Option<&dyn CouplingTerm>,
) -> Result<f64> {
    check_multi(templates, x, targets)?;
    let mut e = 0.0;
    for (f, (t, target)) in templates.iter().zip(targets).enumerate() {
        let p = Vec2::new(x[2 * f], x[2 * f + 1]);
        e += single_energy_at_level(t, frame, p, *target, scale, cfg)
            .map_err(|_| Error::Boundary { feature: Some(f) })?;
    }
    if let Some(c) = coupling {
        e += c.value(x);
    }
    Ok(e)
}

/// Level-coordinate form of [`multi_energy_gradient`].
pub fn multi_gradient_at_level(
    templates: &[Patch],
    frame: &GrayFrame,
    x: &[f64],
    targets: &[Option<Vec2>],
    scale: f64,
    cfg: &EnergyConfig,
    coupling: Option<&dyn CouplingTerm>,
) -> Result<Vec<f64>> {
    check_multi(templates, x, targets)?;
    let mut grad = vec![0.0; x.len()];
    for (f, (t, target)) in templates.iter().zip(targets).enumerate() {
        let p = Vec2::new(x[2 * f], x[2 * f + 1]);
        let g = single_gradient_at_level(t, frame, p, *target, scale, cfg)
            .map_err(|_| Error::Boundary { feature: Some(f) })?;
        grad[2 * f] = g.x;
        grad[2 * f + 1] = g.y;
    }
    if let Some(c) = coupling {
        c.add_gradient(x, &mut grad);
    }
    Ok(grad)
}
