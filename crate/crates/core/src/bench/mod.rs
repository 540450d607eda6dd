//! Synthetic degradation, synthetic scenes with ground truth, the
//! mean-track-length evaluation protocol, and parameter search.

mod degrade;
mod evaluate;
mod learn;
mod synth;
mod texture;
mod truth;

use crate::gyro::{CalibrationProfile, GyroStream};
use crate::imaging::GrayFrame;
use crate::Result;

pub use degrade::{degrade_frame, DegradationProfile};
pub use evaluate::{
    evaluate, evaluate_variant, LossEvent, Segment, TrackReport, TrackSource, DEFAULT_LOSS_RADIUS,
};
pub use learn::{learn_parameters, LearnedParameters};
pub use synth::{synth_sequence, FeatureSpec, MotionProfile, SceneSpec, SyntheticSequence};
pub use texture::{Sprite, Texture};
pub use truth::{GroundTruth, TruthTrack};

/// A video with everything the evaluation protocol needs.
pub trait Sequence {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Frame `k`, numbered and time-stamped.
    fn frame(&self, k: usize) -> Result<GrayFrame>;

    fn gyro(&self) -> Option<&GyroStream>;

    fn truth(&self) -> &GroundTruth;

    fn calibration(&self) -> Option<&CalibrationProfile>;
}
