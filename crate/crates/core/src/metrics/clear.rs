//! CLEAR MOT accuracy and precision.
//!
//! Per frame, a ground-truth object keeps the hypothesis it was last matched
//! to while their IoU stays at or above the threshold. The remaining objects
//! and hypotheses are matched by maximum-IoU assignment. A ground-truth
//! object whose new match differs from its previous one counts an identity
//! switch. MOTP is the mean IoU over all matches.

use std::collections::{BTreeMap, BTreeSet};

use crate::assign::match_by_iou;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::types::{BBox, TrackId};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearReport {
    pub mota: f64,
    /// Mean IoU of matched pairs; 0 when nothing matched.
    pub motp: f64,
    pub fp: u64,
    pub fn_: u64,
    pub ids: u64,
    pub matches: u64,
    pub total_gt: u64,
    /// `ids / total_gt`.
    pub ids_rate: f64,
}

/// One matched ground-truth/hypothesis pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub frame: u64,
    pub gt_id: u32,
    pub track_id: TrackId,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClearOutcome {
    pub report: ClearReport,
    /// Sorted by frame, then ground-truth id.
    pub correspondences: Vec<Correspondence>,
}

fn by_frame<K: Ord + Copy + std::fmt::Display>(
    items: &[(u64, K, BBox)],
    frames: u64,
    what: &str,
) -> Result<Vec<Vec<(K, BBox)>>> {
    let mut out: Vec<BTreeMap<K, BBox>> = vec![BTreeMap::new(); frames as usize];
    for &(f, id, b) in items {
        let slot = out
            .get_mut(f as usize)
            .ok_or_else(|| Error::Data(format!("{what} record at frame {f} outside 0..{frames}")))?;
        if slot.insert(id, b).is_some() {
            return Err(Error::Data(format!("duplicate {what} id {id} in frame {f}")));
        }
    }
    Ok(out.into_iter().map(|m| m.into_iter().collect()).collect())
}

/// Scores hypothesis boxes against ground truth over frames `0..frames`.
///
/// Records may come in any order; within a frame they are keyed by id.
pub fn clear(
    gt: &[(u64, u32, BBox)],
    hyp: &[(u64, TrackId, BBox)],
    frames: u64,
    iou_threshold: f64,
) -> Result<ClearOutcome> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(Error::Config(format!("iou threshold must lie in (0, 1], got {iou_threshold}")));
    }
    let gt_frames = by_frame(gt, frames, "ground-truth")?;
    let hyp_frames = by_frame(hyp, frames, "hypothesis")?;

    let mut last_match: BTreeMap<u32, TrackId> = BTreeMap::new();
    let (mut fp, mut fn_, mut ids, mut total_gt) = (0u64, 0u64, 0u64, 0u64);
    let mut iou_sum = 0.0;
    let mut correspondences = Vec::new();

    for (f, (gts, hyps)) in gt_frames.iter().zip(&hyp_frames).enumerate() {
        let f = f as u64;
        total_gt += gts.len() as u64;
        let hyp_index: BTreeMap<TrackId, usize> = hyps.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();
        let mut gt_done = vec![false; gts.len()];
        let mut hyp_done = vec![false; hyps.len()];
        let mut frame_matches: Vec<(usize, usize, f64)> = Vec::new();

        for (gi, (gid, gbox)) in gts.iter().enumerate() {
            let Some(prev) = last_match.get(gid) else { continue };
            let Some(&hi) = hyp_index.get(prev) else { continue };
            let iou = gbox.iou(&hyps[hi].1);
            if !hyp_done[hi] && iou >= iou_threshold {
                gt_done[gi] = true;
                hyp_done[hi] = true;
                frame_matches.push((gi, hi, iou));
            }
        }

        let free_gt: Vec<usize> = (0..gts.len()).filter(|&i| !gt_done[i]).collect();
        let free_hyp: Vec<usize> = (0..hyps.len()).filter(|&i| !hyp_done[i]).collect();
        let gt_boxes: Vec<BBox> = free_gt.iter().map(|&i| gts[i].1).collect();
        let hyp_boxes: Vec<BBox> = free_hyp.iter().map(|&i| hyps[i].1).collect();
        for (a, b, iou) in match_by_iou(&gt_boxes, &hyp_boxes, iou_threshold) {
            let (gi, hi) = (free_gt[a], free_hyp[b]);
            gt_done[gi] = true;
            hyp_done[hi] = true;
            let gid = gts[gi].0;
            let hid = hyps[hi].0;
            if last_match.get(&gid).is_some_and(|prev| *prev != hid) {
                ids += 1;
            }
            frame_matches.push((gi, hi, iou));
        }

        fn_ += gt_done.iter().filter(|d| !**d).count() as u64;
        fp += hyp_done.iter().filter(|d| !**d).count() as u64;
        frame_matches.sort_by_key(|m| gts[m.0].0);
        for (gi, hi, iou) in frame_matches {
            last_match.insert(gts[gi].0, hyps[hi].0);
            iou_sum += iou;
            correspondences.push(Correspondence { frame: f, gt_id: gts[gi].0, track_id: hyps[hi].0, iou });
        }
    }

    if total_gt == 0 {
        return Err(Error::UndefinedMetric("CLEAR over zero ground-truth boxes".into()));
    }
    let matches = correspondences.len() as u64;
    let report = ClearReport {
        mota: 1.0 - (fp + fn_ + ids) as f64 / total_gt as f64,
        motp: if matches > 0 { iou_sum / matches as f64 } else { 0.0 },
        fp,
        fn_,
        ids,
        matches,
        total_gt,
        ids_rate: ids as f64 / total_gt as f64,
    };
    Ok(ClearOutcome { report, correspondences })
}

/// [`clear`] over a scenario's `gt` and `trk` records.
pub fn clear_scenario(s: &Scenario, iou_threshold: f64) -> Result<ClearOutcome> {
    let gt: Vec<(u64, u32, BBox)> = s.gt.iter().map(|r| (r.frame.frame_index, r.gt_person_id, r.bbox)).collect();
    let hyp: Vec<(u64, TrackId, BBox)> = s.tracks.iter().map(|r| (r.frame, r.track_id, r.bbox)).collect();
    clear(&gt, &hyp, s.frames, iou_threshold)
}

/// Ground-truth ids that ever changed their matched hypothesis.
pub fn switched_gt_ids(outcome: &ClearOutcome) -> BTreeSet<u32> {
    let mut last: BTreeMap<u32, TrackId> = BTreeMap::new();
    let mut out = BTreeSet::new();
    for c in &outcome.correspondences {
        if let Some(prev) = last.insert(c.gt_id, c.track_id) {
            if prev != c.track_id {
                out.insert(c.gt_id);
            }
        }
    }
    out
}
