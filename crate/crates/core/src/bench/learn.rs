use alloc::vec::Vec;

use super::{evaluate_variant, Sequence};
use crate::tracker::{TrackerConfig, TrackerVariant};
use crate::{Error, Result};

/// Best grid point found for one variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnedParameters {
    pub variant: TrackerVariant,
    pub lambda: f64,
    /// Mean track length averaged over the training sequences.
    pub score: f64,
}

/// Exhaustive search over `lambda_grid` for each variant, maximizing mean
/// track length averaged over `training`. Ties go to the smaller lambda.
///
/// Variants without a penalty ignore lambda, so they are evaluated once and
/// reported with the smallest grid value.
pub fn learn_parameters(
    variants: &[TrackerVariant],
    training: &[&dyn Sequence],
    lambda_grid: &[f64],
    base: impl Fn(TrackerVariant) -> TrackerConfig,
    loss_radius: f64,
) -> Result<Vec<LearnedParameters>> {
    if training.is_empty() || lambda_grid.is_empty() {
        return Err(Error::Config("parameter search needs training sequences and a lambda grid"));
    }
    if lambda_grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::Config("lambda grid values must be finite and non-negative"));
    }
    let mut grid = lambda_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut out = Vec::with_capacity(variants.len());
    for &variant in variants {
        let candidates = if variant.uses_penalty() { &grid[..] } else { &grid[..1] };
        let mut best: Option<LearnedParameters> = None;
        for &lambda in candidates {
            let config = base(variant).with_lambda(lambda);
            let mut total = 0.0;
            for seq in training {
                total += evaluate_variant(config, *seq, loss_radius)?.mean_track_length();
            }
            let score = total / training.len() as f64;
            if best.is_none_or(|b| score > b.score) {
                best = Some(LearnedParameters { variant, lambda, score });
            }
        }
        out.push(best.expect("grid is non-empty"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{synth_sequence, DegradationProfile, FeatureSpec, MotionProfile, SceneSpec, Texture};
    use crate::gyro::CalibrationProfile;
    use crate::{Vec2, Vec3};
    use alloc::vec;

    /// Penalty weight on the scale of 0-255 intensities that matches the
    /// default weight on a unit intensity scale.
    const UNIT_SCALE_LAMBDA: f64 = 0.0125 * 255.0;

    fn camera() -> CalibrationProfile {
        CalibrationProfile::pinhole(700.0, 320.0, 240.0).unwrap()
    }

    /// Noisy thin lines with features sitting on them: ambiguous along each
    /// line, so only the prior keeps them in place.
    fn ridges() -> impl Sequence {
        let mut s = SceneSpec::new(640, 480, 40);
        let lines = [(Vec2::new(320.0, 150.0), 10f64), (Vec2::new(200.0, 300.0), 55.0), (Vec2::new(450.0, 330.0), 100.0)];
        for (p, deg) in lines {
            let a = deg.to_radians();
            s.layers.push(Texture::Line { point: p, angle: a, width: 6.0, contrast: 80.0, softness: 1.5 });
            let n = Vec2::new(libm::cos(a), libm::sin(a));
            let along = Vec2::new(-n.y, n.x);
            for j in -2..=2 {
                s.features.push(FeatureSpec::at(p + along * (j as f64 * 40.0) + n * 3.0));
            }
        }
        s.motion = MotionProfile {
            constant: Vec3::zeros(),
            amplitude: Vec3::new(0.3, 0.3, 0.1),
            frequency: Vec3::new(0.4, 0.3, 0.5),
            phase: Vec3::new(0.0, core::f64::consts::FRAC_PI_2, 0.3),
        };
        s.degradation = Some(DegradationProfile::high(9));
        synth_sequence(s, &camera()).unwrap()
    }

    fn still() -> impl Sequence {
        let mut s = SceneSpec::new(320, 240, 3);
        s.layers.push(Texture::Noise { cell: 6.0, amplitude: 40.0, seed: 2 });
        s.features = vec![FeatureSpec::at(Vec2::new(160.0, 120.0))];
        synth_sequence(s, &camera()).unwrap()
    }

    #[test]
    fn single_grid_point_is_returned() {
        let seq = still();
        let learned = learn_parameters(&[TrackerVariant::MultiGyroPrior], &[&seq], &[0.005], TrackerConfig::new, 10.0).unwrap();
        assert_eq!(learned[0].lambda, 0.005);
        assert_eq!(learned[0].score, 3.0);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let seq = still();
        assert!(learn_parameters(&[TrackerVariant::DescentPlain], &[], &[0.0], TrackerConfig::new, 10.0).is_err());
        assert!(learn_parameters(&[TrackerVariant::DescentPlain], &[&seq], &[], TrackerConfig::new, 10.0).is_err());
        assert!(learn_parameters(&[TrackerVariant::DescentPlain], &[&seq], &[-1.0], TrackerConfig::new, 10.0).is_err());
    }

    #[test]
    fn ties_prefer_the_smaller_weight() {
        // A static scene: every weight tracks perfectly.
        let seq = still();
        let learned =
            learn_parameters(&[TrackerVariant::DescentGyroPrior], &[&seq], &[0.5, 0.0, 0.1], TrackerConfig::new, 10.0).unwrap();
        assert_eq!(learned[0].lambda, 0.0);
    }

    #[test]
    fn search_picks_a_weight_that_helps_on_ambiguous_edges() {
        let seq = ridges();
        let learned = learn_parameters(
            &[TrackerVariant::DescentGyroPrior, TrackerVariant::DescentPlain],
            &[&seq],
            &[UNIT_SCALE_LAMBDA, 0.0],
            TrackerConfig::new,
            10.0,
        )
        .unwrap();
        assert_eq!(learned[0].lambda, UNIT_SCALE_LAMBDA);
        assert_eq!(learned[1].lambda, 0.0);
        assert!(learned[0].score > learned[1].score, "{learned:?}");
    }
}
