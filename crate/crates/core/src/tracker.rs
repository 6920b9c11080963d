//! Minimal online IoU tracker.
//!
//! Tracks are associated against their last box (no motion model) by
//! optimal assignment. Unmatched detections spawn tentative tracks, which
//! are confirmed after `confirm_hits` consecutive matches; tentative tracks
//! die on their first miss, confirmed ones after more than `kill_misses`
//! consecutive misses. Only confirmed tracks matched in the current frame
//! are emitted.

use serde::{Deserialize, Serialize};

use crate::assign::match_by_iou;
use crate::error::{Error, Result};
use crate::types::{BBox, TrackId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub iou_threshold: f64,
    pub confirm_hits: u32,
    pub kill_misses: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig { iou_threshold: 0.3, confirm_hits: 2, kill_misses: 5 }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(Error::Config(format!("tracker iou_threshold must lie in (0, 1], got {}", self.iou_threshold)));
        }
        if self.confirm_hits == 0 {
            return Err(Error::Config("tracker confirm_hits must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub id: TrackId,
    pub bbox: BBox,
    /// Consecutive matched frames.
    pub hits: u32,
    /// Consecutive unmatched frames.
    pub misses: u32,
    pub status: TrackStatus,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Association {
    /// `(track index, detection index, iou)`.
    pub matches: Vec<(usize, usize, f64)>,
    pub unmatched_tracks: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
}

/// Optimal one-to-one matching of tracks to detections by IoU.
pub fn associate(tracks: &[TrackState], detections: &[BBox], iou_threshold: f64) -> Association {
    let boxes: Vec<BBox> = tracks.iter().map(|t| t.bbox).collect();
    let matches = match_by_iou(&boxes, detections, iou_threshold);
    let mut track_used = vec![false; tracks.len()];
    let mut det_used = vec![false; detections.len()];
    for &(t, d, _) in &matches {
        track_used[t] = true;
        det_used[d] = true;
    }
    Association {
        matches,
        unmatched_tracks: (0..tracks.len()).filter(|&i| !track_used[i]).collect(),
        unmatched_detections: (0..detections.len()).filter(|&i| !det_used[i]).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    tracks: Vec<TrackState>,
    next_id: u32,
    last_frame: Option<u64>,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Tracker { config, tracks: Vec::new(), next_id: 1, last_frame: None })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Live (tentative or confirmed) tracks.
    pub fn tracks(&self) -> &[TrackState] {
        &self.tracks
    }

    /// Advances one frame and returns the confirmed tracks seen in it,
    /// ordered by id.
    pub fn tick(&mut self, frame: u64, detections: &[BBox]) -> Result<Vec<(TrackId, BBox)>> {
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(Error::Ordering { got: frame, last });
            }
        }
        self.last_frame = Some(frame);

        let assoc = associate(&self.tracks, detections, self.config.iou_threshold);
        for &(t, d, _) in &assoc.matches {
            let track = &mut self.tracks[t];
            track.bbox = detections[d];
            track.hits += 1;
            track.misses = 0;
            if track.status == TrackStatus::Tentative && track.hits >= self.config.confirm_hits {
                track.status = TrackStatus::Confirmed;
            }
        }
        for &t in &assoc.unmatched_tracks {
            let track = &mut self.tracks[t];
            track.hits = 0;
            track.misses += 1;
            let dead = match track.status {
                TrackStatus::Tentative => true,
                _ => track.misses > self.config.kill_misses,
            };
            if dead {
                track.status = TrackStatus::Dead;
            }
        }
        self.tracks.retain(|t| t.status != TrackStatus::Dead);

        for &d in &assoc.unmatched_detections {
            let id = TrackId::new(self.next_id).expect("ids start at 1");
            self.next_id += 1;
            let status = if self.config.confirm_hits <= 1 { TrackStatus::Confirmed } else { TrackStatus::Tentative };
            self.tracks.push(TrackState { id, bbox: detections[d], hits: 1, misses: 0, status });
        }

        let mut out: Vec<(TrackId, BBox)> = self
            .tracks
            .iter()
            .filter(|t| t.status == TrackStatus::Confirmed && t.misses == 0)
            .map(|t| (t.id, t.bbox))
            .collect();
        out.sort_by_key(|(id, _)| *id);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(x: f64) -> BBox {
        BBox::new(x, 100.0, 40.0, 100.0).unwrap()
    }

    #[test]
    fn associate_edge_cases() {
        let a = associate(&[], &[bx(0.0), bx(100.0), bx(200.0)], 0.3);
        assert!(a.matches.is_empty());
        assert_eq!(a.unmatched_detections, vec![0, 1, 2]);

        let t = TrackState {
            id: TrackId::new(1).unwrap(),
            bbox: bx(10.0),
            hits: 1,
            misses: 0,
            status: TrackStatus::Confirmed,
        };
        let a = associate(&[t], &[bx(10.0)], 0.3);
        assert_eq!(a.matches, vec![(0, 0, 1.0)]);
        assert!(a.unmatched_tracks.is_empty() && a.unmatched_detections.is_empty());
    }

    #[test]
    fn single_walker_gets_one_confirmed_track() {
        let mut tr = Tracker::new(TrackerConfig::default()).unwrap();
        let mut ids = std::collections::BTreeSet::new();
        for f in 0..50u64 {
            let out = tr.tick(f, &[bx(f as f64 * 2.0)]).unwrap();
            if f == 0 {
                assert!(out.is_empty(), "confirmation latency");
            } else {
                assert_eq!(out.len(), 1);
            }
            ids.extend(out.iter().map(|o| o.0));
        }
        assert_eq!(ids.len(), 1);
    }

    #[test]
    fn gap_longer_than_kill_spawns_new_id() {
        let cfg = TrackerConfig::default();
        let run = |gap: u64| {
            let mut tr = Tracker::new(cfg).unwrap();
            let mut ids = Vec::new();
            for f in 0..30u64 {
                let dets = if (10..10 + gap).contains(&f) { vec![] } else { vec![bx(50.0)] };
                for (id, _) in tr.tick(f, &dets).unwrap() {
                    if ids.last() != Some(&id) {
                        ids.push(id);
                    }
                }
            }
            ids
        };
        assert_eq!(run(cfg.kill_misses as u64).len(), 1);
        assert_eq!(run(cfg.kill_misses as u64 + 1).len(), 2);
    }

    #[test]
    fn tentative_dies_on_first_miss() {
        let mut tr = Tracker::new(TrackerConfig::default()).unwrap();
        tr.tick(0, &[bx(0.0)]).unwrap();
        tr.tick(1, &[]).unwrap();
        assert!(tr.tracks().is_empty());
    }

    #[test]
    fn out_of_order_frames_rejected() {
        let mut tr = Tracker::new(TrackerConfig::default()).unwrap();
        tr.tick(3, &[]).unwrap();
        assert!(matches!(tr.tick(3, &[]), Err(Error::Ordering { got: 3, last: 3 })));
        assert!(tr.tick(2, &[]).is_err());
        assert!(tr.tick(4, &[]).is_ok());
    }

    #[test]
    fn deterministic_over_identical_streams() {
        let stream: Vec<Vec<BBox>> = (0..40)
            .map(|f| {
                let f = f as f64;
                vec![bx(f * 3.0), bx(300.0 - f * 3.0), bx(500.0)]
            })
            .collect();
        let run = || {
            let mut tr = Tracker::new(TrackerConfig::default()).unwrap();
            stream.iter().enumerate().map(|(f, d)| tr.tick(f as u64, d).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn config_validation() {
        let bad = TrackerConfig { iou_threshold: 0.0, ..Default::default() };
        assert!(Tracker::new(bad).is_err());
        let bad = TrackerConfig { confirm_hits: 0, ..Default::default() };
        assert!(Tracker::new(bad).is_err());
    }
}
