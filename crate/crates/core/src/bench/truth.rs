use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::{Error, Result, Vec2};

/// True positions of one feature over consecutive frames.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTrack {
    pub id: u64,
    pub birth: u64,
    positions: Vec<Vec2>,
}

impl TruthTrack {
    pub fn new(id: u64, birth: u64, positions: Vec<Vec2>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Data("ground-truth track has no positions"));
        }
        if positions.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Data("ground-truth position is not finite"));
        }
        Ok(Self { id, birth, positions })
    }

    /// First frame after the feature's life.
    pub fn death(&self) -> u64 {
        self.birth + self.positions.len() as u64
    }

    pub fn lifespan(&self) -> u64 {
        self.positions.len() as u64
    }

    pub fn at(&self, frame: u64) -> Option<Vec2> {
        frame.checked_sub(self.birth).and_then(|i| self.positions.get(i as usize)).copied()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }
}

/// Per-frame, per-feature true positions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    tracks: Vec<TruthTrack>,
}

impl GroundTruth {
    pub fn new(mut tracks: Vec<TruthTrack>) -> Result<Self> {
        tracks.sort_by_key(|t| t.id);
        if tracks.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::Data("duplicate feature id in ground truth"));
        }
        Ok(Self { tracks })
    }

    /// Builds tracks from `(frame, feature_id, position)` rows in any order.
    /// Each feature's frames must be contiguous.
    pub fn from_rows(rows: impl IntoIterator<Item = (u64, u64, Vec2)>) -> Result<Self> {
        let mut by_id: BTreeMap<u64, Vec<(u64, Vec2)>> = BTreeMap::new();
        for (frame, id, p) in rows {
            by_id.entry(id).or_default().push((frame, p));
        }
        let mut tracks = Vec::with_capacity(by_id.len());
        for (id, mut rows) in by_id {
            rows.sort_by_key(|r| r.0);
            let birth = rows[0].0;
            for (i, r) in rows.iter().enumerate() {
                if r.0 != birth + i as u64 {
                    return Err(Error::Data("ground truth rows for a feature are missing or duplicated"));
                }
            }
            tracks.push(TruthTrack::new(id, birth, rows.into_iter().map(|r| r.1).collect())?);
        }
        Self::new(tracks)
    }

    /// `(frame, feature_id, position)` rows ordered by frame, then id.
    pub fn rows(&self) -> Vec<(u64, u64, Vec2)> {
        let mut rows: Vec<_> = self
            .tracks
            .iter()
            .flat_map(|t| (0..t.lifespan()).map(move |i| (t.birth + i, t.id, t.positions[i as usize])))
            .collect();
        rows.sort_by_key(|r| (r.0, r.1));
        rows
    }

    pub fn tracks(&self) -> &[TruthTrack] {
        &self.tracks
    }

    pub fn track(&self, id: u64) -> Option<&TruthTrack> {
        self.tracks.binary_search_by_key(&id, |t| t.id).ok().map(|i| &self.tracks[i])
    }

    /// One past the last frame any feature is alive in.
    pub fn frame_count(&self) -> u64 {
        self.tracks.iter().map(TruthTrack::death).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rows_round_trip() {
        let t = GroundTruth::new(vec![
            TruthTrack::new(4, 2, vec![Vec2::new(1.0, 2.0), Vec2::new(3.0, 4.0)]).unwrap(),
            TruthTrack::new(1, 0, vec![Vec2::new(5.0, 6.0); 3]).unwrap(),
        ])
        .unwrap();
        let rows = t.rows();
        assert_eq!(rows.first().unwrap().1, 1);
        assert_eq!(GroundTruth::from_rows(rows.into_iter().rev()).unwrap(), t);
        assert_eq!(t.frame_count(), 4);
        assert_eq!(t.track(4).unwrap().at(3), Some(Vec2::new(3.0, 4.0)));
        assert_eq!(t.track(4).unwrap().at(1), None);
    }

    #[test]
    fn gaps_and_duplicates_are_data_errors() {
        let p = Vec2::zeros();
        assert!(matches!(GroundTruth::from_rows([(0, 1, p), (2, 1, p)]), Err(Error::Data(_))));
        assert!(matches!(GroundTruth::from_rows([(0, 1, p), (0, 1, p)]), Err(Error::Data(_))));
        let dup = vec![TruthTrack::new(1, 0, vec![p]).unwrap(), TruthTrack::new(1, 3, vec![p]).unwrap()];
        assert!(GroundTruth::new(dup).is_err());
    }
}
