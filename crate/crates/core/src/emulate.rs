//! Analysis-module emulation on track crops.
//!
//! A scenario carries one head and one skeleton observation per person per
//! frame. Running a module on a track's crop returns the observations of the
//! ground-truth person that best overlaps the crop, provided the overlap
//! reaches [`CROP_IOU`]. Ties go to the lowest person id.

use std::collections::BTreeMap;

use crate::scenario::Scenario;
use crate::types::{BBox, SkeletonObservation};

/// Minimum IoU between a crop and a person for the person to be analysed.
pub const CROP_IOU: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropObservation {
    pub person: u32,
    pub head: Option<f64>,
    pub skeleton: Option<SkeletonObservation>,
}

#[derive(Debug, Clone, Default)]
struct FramePeople {
    /// Sorted by person id.
    boxes: Vec<(u32, BBox)>,
    head: BTreeMap<u32, f64>,
    skeleton: BTreeMap<u32, SkeletonObservation>,
}

/// Per-frame lookup of persons and their emulated observations.
#[derive(Debug, Clone)]
pub struct ObservationIndex {
    frames: Vec<FramePeople>,
}

impl ObservationIndex {
    pub fn new(s: &Scenario) -> Self {
        let mut frames = vec![FramePeople::default(); s.frames as usize];
        let slot = |frames: &mut Vec<FramePeople>, f: u64| {
            let f = f as usize;
            if f >= frames.len() {
                frames.resize_with(f + 1, FramePeople::default);
            }
            f
        };
        for r in &s.gt {
            let f = slot(&mut frames, r.frame.frame_index);
            frames[f].boxes.push((r.gt_person_id, r.bbox));
        }
        for r in &s.head_obs {
            let f = slot(&mut frames, r.frame);
            frames[f].head.insert(r.person, r.theta);
        }
        for r in &s.skel_obs {
            let f = slot(&mut frames, r.frame);
            frames[f].skeleton.insert(r.person, r.skeleton);
        }
        for fp in &mut frames {
            fp.boxes.sort_by_key(|(id, _)| *id);
        }
        ObservationIndex { frames }
    }

    /// Person whose ground-truth box best overlaps `crop` in `frame`.
    pub fn person_at(&self, frame: u64, crop: &BBox) -> Option<u32> {
        let fp = self.frames.get(frame as usize)?;
        let mut best: Option<(u32, f64)> = None;
        for (id, b) in &fp.boxes {
            let iou = crop.iou(b);
            if iou >= CROP_IOU && best.is_none_or(|(_, bi)| iou > bi) {
                best = Some((*id, iou));
            }
        }
        best.map(|(id, _)| id)
    }

    /// Runs both modules on `crop`.
    pub fn observe(&self, frame: u64, crop: &BBox) -> Option<CropObservation> {
        let person = self.person_at(frame, crop)?;
        let fp = &self.frames[frame as usize];
        Some(CropObservation {
            person,
            head: fp.head.get(&person).copied(),
            skeleton: fp.skeleton.get(&person).copied(),
        })
    }
}
