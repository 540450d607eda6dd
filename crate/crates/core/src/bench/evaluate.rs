use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{GroundTruth, Sequence};
use crate::gyro::{CalibrationProfile, GyroStream};
use crate::imaging::GrayFrame;
use crate::tracker::{FeatureStatus, FeatureUpdate, Tracker, TrackerConfig};
use crate::{Error, Result, Vec2};

/// Distance from ground truth at which a feature counts as lost.
pub const DEFAULT_LOSS_RADIUS: f64 = 10.0;

/// Anything that can be driven through the evaluation protocol.
pub trait TrackSource {
    /// Sets the first frame and forgets all features.
    fn start(&mut self, frame: &GrayFrame) -> Result<()>;
    /// Starts (or restarts) feature `id` at `position` in the latest frame.
    fn place(&mut self, id: u64, position: Vec2) -> Result<()>;
    fn remove(&mut self, id: u64);
    fn track(&mut self, frame: &GrayFrame, gyro: Option<&GyroStream>) -> Result<Vec<FeatureUpdate>>;
}

impl TrackSource for Tracker {
    fn start(&mut self, frame: &GrayFrame) -> Result<()> {
        Tracker::start(self, frame)
    }

    fn place(&mut self, id: u64, position: Vec2) -> Result<()> {
        self.reset_feature(id, position)
    }

    fn remove(&mut self, id: u64) {
        self.remove_feature(id)
    }

    fn track(&mut self, frame: &GrayFrame, gyro: Option<&GyroStream>) -> Result<Vec<FeatureUpdate>> {
        self.track_frame(frame, gyro)
    }
}

/// Frames from one re-initialization of a feature to the next (or to the end
/// of its life).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub feature: u64,
    pub start: u64,
    pub end: u64,
}

impl Segment {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEvent {
    pub frame: u64,
    pub feature: u64,
    /// Distance from ground truth when the loss was declared; infinite if the
    /// tracker itself terminated the feature.
    pub drift: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackReport {
    pub segments: Vec<Segment>,
    pub losses: Vec<LossEvent>,
    /// Frames processed, including the first.
    pub frames: u64,
}

impl TrackReport {
    pub fn tracked_frames(&self) -> u64 {
        self.segments.iter().map(Segment::len).sum()
    }

    /// Total tracked frames over the number of segments; zero if there are none.
    pub fn mean_track_length(&self) -> f64 {
        if self.segments.is_empty() {
            return 0.0;
        }
        self.tracked_frames() as f64 / self.segments.len() as f64
    }

    pub fn loss_count(&self) -> usize {
        self.losses.len()
    }

    /// Segments of one feature in order.
    pub fn feature_segments(&self, id: u64) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(move |s| s.feature == id)
    }
}

struct Open {
    start: u64,
    death: u64,
}

/// Runs `source` over `frames` and scores it against `truth`.
///
/// Features are placed at their true position in their birth frame. After
/// every tracked frame, a feature at least `loss_radius` from the truth (or
/// terminated by the tracker) is logged as lost and placed back on the truth.
/// Every feature contributes its closing segment as well. A feature whose
/// true position cannot be tracked from (too close to the border for its
/// templates) is retired at that frame.
pub fn evaluate<S, I>(
    source: &mut S,
    frames: I,
    gyro: Option<&GyroStream>,
    truth: &GroundTruth,
    loss_radius: f64,
) -> Result<TrackReport>
where
    S: TrackSource + ?Sized,
    I: IntoIterator<Item = Result<GrayFrame>>,
{
    if !(loss_radius > 0.0) {
        return Err(Error::Config("loss radius must be positive"));
    }
    let mut report = TrackReport::default();
    let mut open: BTreeMap<u64, Open> = BTreeMap::new();
    let mut frames = frames.into_iter();

    let first = frames.next().ok_or(Error::InsufficientData("no frames to evaluate"))??;
    source.start(&first)?;
    spawn(source, truth, 0, &mut open, &mut report);
    report.frames = 1;

    for (k, frame) in (1u64..).zip(frames) {
        let frame = frame?;
        let updates = source.track(&frame, gyro)?;
        report.frames = k + 1;

        let ids: Vec<u64> = open.keys().copied().collect();
        for id in ids {
            let expected = truth.track(id).and_then(|t| t.at(k));
            let Some(expected) = expected else {
                return Err(Error::Data("ground truth is missing a frame for a live feature"));
            };
            let drift = match updates.iter().find(|u| u.id == id) {
                Some(u) if u.status == FeatureStatus::Active => (u.position - expected).norm(),
                _ => f64::INFINITY,
            };
            if drift >= loss_radius {
                report.losses.push(LossEvent { frame: k, feature: id, drift });
                let seg = open.get_mut(&id).expect("listed above");
                report.segments.push(Segment { feature: id, start: seg.start, end: k });
                seg.start = k;
                if source.place(id, expected).is_err() {
                    open.remove(&id);
                    source.remove(id);
                    continue;
                }
            }
            let seg = &open[&id];
            if k + 1 == seg.death {
                report.segments.push(Segment { feature: id, start: seg.start, end: seg.death });
                open.remove(&id);
                source.remove(id);
            }
        }
        spawn(source, truth, k, &mut open, &mut report);
    }

    let last = report.frames;
    for (id, seg) in open {
        if seg.start < last {
            report.segments.push(Segment { feature: id, start: seg.start, end: last });
        }
    }
    report.segments.retain(|s| !s.is_empty());
    report.segments.sort_by_key(|s| (s.feature, s.start));
    Ok(report)
}

fn spawn<S: TrackSource + ?Sized>(
    source: &mut S,
    truth: &GroundTruth,
    frame: u64,
    open: &mut BTreeMap<u64, Open>,
    report: &mut TrackReport,
) {
    for t in truth.tracks().iter().filter(|t| t.birth == frame) {
        let p = t.at(frame).expect("birth frame is in range");
        if source.place(t.id, p).is_ok() {
            if t.lifespan() == 1 {
                report.segments.push(Segment { feature: t.id, start: frame, end: frame + 1 });
                source.remove(t.id);
            } else {
                open.insert(t.id, Open { start: frame, death: t.death() });
            }
        }
    }
}

/// Builds a tracker for `config` and evaluates it on `sequence`.
pub fn evaluate_variant(
    config: TrackerConfig,
    sequence: &dyn Sequence,
    loss_radius: f64,
) -> Result<TrackReport> {
    let calibration: Option<CalibrationProfile> =
        if config.variant.uses_gyro() { sequence.calibration().cloned() } else { None };
    let mut tracker = Tracker::new(config, calibration)?;
    let frames = (0..sequence.len()).map(|k| sequence.frame(k));
    evaluate(&mut tracker, frames, sequence.gyro(), sequence.truth(), loss_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::TruthTrack;
    use alloc::vec;
    use proptest::prelude::*;

    /// Replays `path(id, frame, placed_frame, placed_position)`, ignoring
    /// imagery. `None` reports the feature as terminated.
    struct Scripted<F> {
        frame: u64,
        placed: BTreeMap<u64, (u64, Vec2)>,
        path: F,
    }

    fn scripted<F: FnMut(u64, u64, u64, Vec2) -> Option<Vec2>>(path: F) -> Scripted<F> {
        Scripted { frame: 0, placed: BTreeMap::new(), path }
    }

    impl<F: FnMut(u64, u64, u64, Vec2) -> Option<Vec2>> TrackSource for Scripted<F> {
        fn start(&mut self, _: &GrayFrame) -> Result<()> {
            self.frame = 0;
            self.placed.clear();
            Ok(())
        }
        fn place(&mut self, id: u64, position: Vec2) -> Result<()> {
            self.placed.insert(id, (self.frame, position));
            Ok(())
        }
        fn remove(&mut self, id: u64) {
            self.placed.remove(&id);
        }
        fn track(&mut self, _: &GrayFrame, _: Option<&GyroStream>) -> Result<Vec<FeatureUpdate>> {
            self.frame += 1;
            let k = self.frame;
            let path = &mut self.path;
            Ok(self
                .placed
                .iter()
                .map(|(&id, &(since, p))| match path(id, k, since, p) {
                    Some(position) => FeatureUpdate { id, position, status: FeatureStatus::Active },
                    None => FeatureUpdate { id, position: p, status: FeatureStatus::LostBoundary },
                })
                .collect())
        }
    }

    fn blank_frames(n: u64) -> impl Iterator<Item = Result<GrayFrame>> {
        (0..n).map(|k| Ok(GrayFrame::filled(8, 8, 0.0).with_time(k, k as f64)))
    }

    fn drifting(id: u64, birth: u64, len: usize, rate: f64) -> TruthTrack {
        TruthTrack::new(id, birth, (0..len).map(|i| Vec2::new(50.0 + rate * i as f64, 40.0)).collect()).unwrap()
    }

    fn lengths(r: &TrackReport) -> Vec<u64> {
        r.segments.iter().map(Segment::len).collect()
    }

    #[test]
    fn perfect_tracker_scores_mean_lifespan() {
        let truth = GroundTruth::new(vec![drifting(0, 0, 40, 1.0), drifting(1, 5, 20, 1.0)]).unwrap();
        let t = truth.clone();
        let mut src = scripted(move |id, k, _, _| t.track(id).unwrap().at(k));
        let report = evaluate(&mut src, blank_frames(40), None, &truth, 10.0).unwrap();
        assert!(report.losses.is_empty());
        assert_eq!(lengths(&report), vec![40, 20]);
        assert_eq!(report.mean_track_length(), 30.0);
    }

    #[test]
    fn scheduled_losses_split_segments() {
        let truth = GroundTruth::new(vec![drifting(7, 0, 100, 0.5)]).unwrap();
        let t = truth.clone();
        let mut src = scripted(move |id, k, _, _| {
            let p = t.track(id).unwrap().at(k)?;
            Some(if k == 30 || k == 70 { p + Vec2::new(0.0, 12.0) } else { p })
        });
        let report = evaluate(&mut src, blank_frames(100), None, &truth, 10.0).unwrap();
        assert_eq!(lengths(&report), vec![30, 40, 30]);
        assert_eq!(report.losses.iter().map(|l| l.frame).collect::<Vec<_>>(), vec![30, 70]);
        assert!((report.mean_track_length() - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn frozen_tracker_loses_every_tenth_frame() {
        let truth = GroundTruth::new(vec![drifting(0, 0, 100, 1.0)]).unwrap();
        let mut src = scripted(|_, _, _, p| Some(p));
        let report = evaluate(&mut src, blank_frames(100), None, &truth, 10.0).unwrap();
        let frames: Vec<u64> = report.losses.iter().map(|l| l.frame).collect();
        assert_eq!(frames, (1..10).map(|i| 10 * i).collect::<Vec<_>>());
        assert!(report.losses.iter().all(|l| (l.drift - 10.0).abs() < 1e-9));
        assert_eq!(report.mean_track_length(), 10.0);
    }

    #[test]
    fn termination_counts_as_loss() {
        let truth = GroundTruth::new(vec![drifting(0, 0, 20, 0.0)]).unwrap();
        let mut src = scripted(|_, k, _, p| (k != 5).then_some(p));
        let report = evaluate(&mut src, blank_frames(20), None, &truth, 10.0).unwrap();
        assert_eq!(report.losses.len(), 1);
        assert!(report.losses[0].drift.is_infinite());
        assert_eq!(lengths(&report), vec![5, 15]);
    }

    #[test]
    fn missing_truth_and_bad_radius_are_rejected() {
        let truth = GroundTruth::new(vec![drifting(0, 0, 5, 0.0)]).unwrap();
        let mut src = scripted(|_, _, _, p| Some(p));
        assert!(matches!(evaluate(&mut src, blank_frames(5), None, &truth, 0.0), Err(Error::Config(_))));
        assert!(evaluate(&mut src, blank_frames(0), None, &truth, 10.0).is_err());
    }

    proptest! {
        #[test]
        fn report_is_consistent_and_monotone_in_radius(
            seed in any::<u64>(),
            features in 1usize..5,
            r in 2.0f64..15.0,
        ) {
            let truth = GroundTruth::new(
                (0..features).map(|i| drifting(i as u64, i as u64 * 3, 40, 0.3 * i as f64)).collect()
            ).unwrap();
            let jitter = move |id: u64, k: u64| {
                let mut z = seed ^ id.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ k.wrapping_mul(0xbf58_476d_1ce4_e5b9);
                z = (z ^ (z >> 31)).wrapping_mul(0x94d0_49bb_1331_11eb);
                (z >> 11) as f64 / (1u64 << 53) as f64
            };
            let run = |radius: f64| {
                let t = truth.clone();
                let mut src = scripted(move |id, k, _, _| {
                    let p = t.track(id).unwrap().at(k)?;
                    Some(p + Vec2::new(20.0 * jitter(id, k), 0.0))
                });
                evaluate(&mut src, blank_frames(50), None, &truth, radius).unwrap()
            };
            let small = run(r);
            let large = run(r + 3.0);
            prop_assert!(large.loss_count() <= small.loss_count());

            for report in [&small, &large] {
                let mut recount = 0u64;
                let mut segments = 0usize;
                for track in truth.tracks() {
                    let mut start = track.birth;
                    for loss in report.losses.iter().filter(|l| l.feature == track.id) {
                        recount += loss.frame - start;
                        start = loss.frame;
                        segments += 1;
                    }
                    recount += track.death().min(50) - start;
                    segments += 1;
                }
                prop_assert_eq!(segments, report.segments.len());
                prop_assert!((report.mean_track_length() - recount as f64 / segments as f64).abs() < 1e-12);
            }
        }
    }
}
