//! Attribute accuracy on CLEAR-matched (ground truth, track) pairs.
//!
//! Two estimate streams are scored over the same correspondences: the raw
//! analysis output on the track's crop in every matched frame, and the
//! filtered `trk-attr` values. Head orientation scores as mean absolute
//! angular offset and PCO; joints as mean pixel offset and PCKh, counted only
//! where the ground-truth joint is visible.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::clear::Correspondence;
use super::{mean, pckh, pco, PCO_THRESHOLD_DEG};
use crate::angle::angular_distance;
use crate::emulate::ObservationIndex;
use crate::error::{Error, Result};
use crate::scenario::{AttrRecord, AttrValue, Channel, Scenario};
use crate::types::{BBox, GroundTruthRecord, JointName, Point2, TrackId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Raw,
    Filtered,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Raw => "raw",
            Source::Filtered => "filtered",
        })
    }
}

/// A channel or a pooled group of joint channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChannelSelector {
    Head,
    Joints(String, Vec<JointName>),
}

impl ChannelSelector {
    pub fn joint(j: JointName) -> Self {
        ChannelSelector::Joints(Channel::Joint(j).to_string(), vec![j])
    }

    pub fn channels(&self) -> Vec<Channel> {
        match self {
            ChannelSelector::Head => vec![Channel::Head],
            ChannelSelector::Joints(_, js) => js.iter().map(|j| Channel::Joint(*j)).collect(),
        }
    }

    /// Per-channel selectors followed by the pooled skeleton.
    pub fn standard() -> Vec<ChannelSelector> {
        let mut out = vec![ChannelSelector::Head];
        out.extend(JointName::ALL.map(ChannelSelector::joint));
        out.push("skeleton".parse().expect("known group"));
        out
    }
}

impl fmt::Display for ChannelSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSelector::Head => f.write_str("head"),
            ChannelSelector::Joints(name, _) => f.write_str(name),
        }
    }
}

impl FromStr for ChannelSelector {
    type Err = Error;

    /// `head`, a joint (`skel.l_wrist` or `l_wrist`), or one of the groups
    /// `wrists`, `elbows`, `shoulders`, `head_neck`, `skeleton`.
    fn from_str(s: &str) -> Result<Self> {
        use JointName::*;
        let group = |js: &[JointName]| Ok(ChannelSelector::Joints(s.to_string(), js.to_vec()));
        match s {
            "head" => Ok(ChannelSelector::Head),
            "wrists" => group(&[LWrist, RWrist]),
            "elbows" => group(&[LElbow, RElbow]),
            "shoulders" => group(&[LShoulder, RShoulder]),
            "head_neck" => group(&[Head, Neck]),
            "skeleton" => group(&JointName::ALL),
            _ => {
                let joint = s.strip_prefix("skel.").unwrap_or(s);
                joint
                    .parse::<JointName>()
                    .map(ChannelSelector::joint)
                    .map_err(|_| Error::Config(format!("unknown channel selector `{s}`")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub selector: String,
    pub source: Source,
    /// Degrees for the head, pixels for joints.
    pub mean_offset: f64,
    /// PCO for the head, PCKh for joints.
    pub score: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttrReport {
    pub rows: Vec<ChannelReport>,
}

impl AttrReport {
    pub fn get(&self, selector: &str, source: Source) -> Option<&ChannelReport> {
        self.rows.iter().find(|r| r.selector == selector && r.source == source)
    }
}

#[derive(Debug, Clone, Copy)]
struct Pair {
    frame: u64,
    track: TrackId,
    gt: GroundTruthRecord,
    bbox: BBox,
}

/// Ground truth and raw estimates along a fixed correspondence, ready to
/// score any number of filtered streams.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pairs: Vec<Pair>,
    raw: AttrEvaluation,
}

/// Error samples per channel and source: `(error, head_size)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttrEvaluation {
    samples: BTreeMap<(Channel, Source), Vec<(f64, f64)>>,
}

fn sample(gt: &GroundTruthRecord, channel: Channel, value: AttrValue) -> Option<(f64, f64)> {
    match (channel, value) {
        (Channel::Head, AttrValue::Angle(a)) => Some((angular_distance(a, gt.head_theta).ok()?, gt.head_size)),
        (Channel::Joint(j), AttrValue::Point(p)) => {
            let truth: Point2 = gt.skeleton.joint(j)?;
            Some((p.distance(&truth), gt.head_size))
        }
        _ => None,
    }
}

impl EvalContext {
    /// Pairs every correspondence with its ground truth and track box, and
    /// scores the raw crop observations.
    pub fn new(s: &Scenario, correspondences: &[Correspondence]) -> Result<Self> {
        let gt: BTreeMap<(u64, u32), &GroundTruthRecord> =
            s.gt.iter().map(|r| ((r.frame.frame_index, r.gt_person_id), r)).collect();
        let trk: BTreeMap<(u64, TrackId), BBox> = s.tracks.iter().map(|r| ((r.frame, r.track_id), r.bbox)).collect();
        let index = ObservationIndex::new(s);

        let mut pairs = Vec::with_capacity(correspondences.len());
        let mut raw = AttrEvaluation::default();
        for c in correspondences {
            let g = gt
                .get(&(c.frame, c.gt_id))
                .ok_or_else(|| Error::Data(format!("no ground truth for person {} in frame {}", c.gt_id, c.frame)))?;
            let bbox = *trk
                .get(&(c.frame, c.track_id))
                .ok_or_else(|| Error::Data(format!("no track {} in frame {}", c.track_id, c.frame)))?;
            let pair = Pair { frame: c.frame, track: c.track_id, gt: **g, bbox };
            if let Some(obs) = index.observe(pair.frame, &pair.bbox) {
                if let Some(theta) = obs.head {
                    raw.push(Channel::Head, Source::Raw, sample(&pair.gt, Channel::Head, AttrValue::Angle(theta)));
                }
                if let Some(skel) = obs.skeleton {
                    for j in JointName::ALL {
                        if let Some(p) = skel.joint(j) {
                            let ch = Channel::Joint(j);
                            raw.push(ch, Source::Raw, sample(&pair.gt, ch, AttrValue::Point(p)));
                        }
                    }
                }
            }
            pairs.push(pair);
        }
        Ok(EvalContext { pairs, raw })
    }

    pub fn matched_frames(&self) -> usize {
        self.pairs.len()
    }

    /// Raw samples plus those of the filtered stream `attrs`.
    pub fn evaluate(&self, attrs: &[AttrRecord]) -> Result<AttrEvaluation> {
        if self.pairs.is_empty() {
            return Err(Error::UndefinedMetric("no matched (ground truth, track) frames".into()));
        }
        let by_key: BTreeMap<(u64, TrackId, Channel), AttrValue> =
            attrs.iter().map(|r| ((r.frame, r.track_id, r.channel), r.value)).collect();
        let mut eval = self.raw.clone();
        for p in &self.pairs {
            for ch in Channel::ALL {
                if let Some(v) = by_key.get(&(p.frame, p.track, ch)) {
                    eval.push(ch, Source::Filtered, sample(&p.gt, ch, *v));
                }
            }
        }
        Ok(eval)
    }
}

impl AttrEvaluation {
    fn push(&mut self, channel: Channel, source: Source, s: Option<(f64, f64)>) {
        if let Some(s) = s {
            self.samples.entry((channel, source)).or_default().push(s);
        }
    }

    pub fn samples(&self, channel: Channel, source: Source) -> &[(f64, f64)] {
        self.samples.get(&(channel, source)).map_or(&[], Vec::as_slice)
    }

    pub fn report(&self, selector: &ChannelSelector, source: Source) -> Result<ChannelReport> {
        let pooled: Vec<(f64, f64)> =
            selector.channels().into_iter().flat_map(|c| self.samples(c, source).iter().copied()).collect();
        if pooled.is_empty() {
            return Err(Error::UndefinedMetric(format!("no {source} samples for `{selector}`")));
        }
        let errors: Vec<f64> = pooled.iter().map(|s| s.0).collect();
        let score = match selector {
            ChannelSelector::Head => pco(&errors, PCO_THRESHOLD_DEG)?,
            ChannelSelector::Joints(..) => pckh(&pooled)?,
        };
        Ok(ChannelReport {
            selector: selector.to_string(),
            source,
            mean_offset: mean(&errors)?,
            score,
            samples: pooled.len(),
        })
    }

    /// Raw and filtered rows for every selector that has samples.
    pub fn full_report(&self, selectors: &[ChannelSelector]) -> Result<AttrReport> {
        let mut rows = Vec::new();
        for sel in selectors {
            for source in [Source::Raw, Source::Filtered] {
                match self.report(sel, source) {
                    Ok(r) => rows.push(r),
                    Err(Error::UndefinedMetric(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        if rows.is_empty() {
            return Err(Error::UndefinedMetric("no attribute samples on matched frames".into()));
        }
        Ok(AttrReport { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_parse() {
        assert_eq!("head".parse::<ChannelSelector>().unwrap(), ChannelSelector::Head);
        assert_eq!("skel.l_wrist".parse::<ChannelSelector>().unwrap(), ChannelSelector::joint(JointName::LWrist));
        assert_eq!("l_wrist".parse::<ChannelSelector>().unwrap().to_string(), "skel.l_wrist");
        assert_eq!("wrists".parse::<ChannelSelector>().unwrap().channels().len(), 2);
        assert_eq!("skeleton".parse::<ChannelSelector>().unwrap().channels().len(), 8);
        assert!(matches!("knee".parse::<ChannelSelector>(), Err(Error::Config(_))));
        assert_eq!(ChannelSelector::standard().len(), 10);
    }

    #[test]
    fn empty_context_is_undefined() {
        let s = Scenario::empty(30.0);
        let ctx = EvalContext::new(&s, &[]).unwrap();
        assert!(matches!(ctx.evaluate(&[]), Err(Error::UndefinedMetric(_))));
        let e = AttrEvaluation::default();
        assert!(matches!(e.report(&ChannelSelector::Head, Source::Raw), Err(Error::UndefinedMetric(_))));
    }
}
