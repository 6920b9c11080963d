//! Per-track, per-channel filter lifecycle.
//!
//! A [`FilterBank`] owns one filter for every `(track, channel)` key. Keys
//! are created by the first observation for that key and destroyed once
//! their track has been absent for `expire_frames` consecutive frames. Every
//! live key is stepped once per frame, with an observation when its module
//! is scheduled and produced one, by prediction otherwise, and reported in
//! that frame's output.

pub mod cost;
pub mod params;
pub mod schedule;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ghfilter::{AngularGHState, GHFilter, PointGHState};
use crate::scenario::{AttrValue, Channel};
use crate::types::{AttributeObservation, FrameStamp, JointName, TrackId};

pub use cost::{account_cost, analytic_hz, analytic_speedup, CostMeter, CostModel, ThroughputSummary};
pub use params::ChannelParams;
pub use schedule::{should_observe, FreeFlightConfig, ModuleSchedule, HEAD_MODULE, SKELETON_MODULE};

pub const DEFAULT_EXPIRE_FRAMES: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FilterKey {
    pub track_id: TrackId,
    pub channel: Channel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ChannelFilter {
    Angular(AngularGHState),
    Point(PointGHState),
}

impl ChannelFilter {
    fn value(&self) -> AttrValue {
        match self {
            ChannelFilter::Angular(s) => AttrValue::Angle(s.x()),
            ChannelFilter::Point(s) => AttrValue::Point(s.position()),
        }
    }
}

/// Filtered value of one key in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BankOutput {
    pub key: FilterKey,
    pub value: AttrValue,
    /// The key was updated with an observation in this frame.
    pub observed: bool,
}

/// Module that produces a given observation kind.
pub fn module_of(obs: &AttributeObservation) -> &'static str {
    match obs {
        AttributeObservation::Angular(_) => HEAD_MODULE,
        AttributeObservation::Skeleton(_) => SKELETON_MODULE,
    }
}

#[derive(Debug, Clone)]
pub struct FilterBank {
    params: ChannelParams,
    schedule: FreeFlightConfig,
    expire_frames: u64,
    filters: BTreeMap<FilterKey, ChannelFilter>,
    last_seen: BTreeMap<TrackId, u64>,
    last_frame: Option<FrameStamp>,
    dropped: u64,
}

impl FilterBank {
    pub fn new(params: ChannelParams, schedule: FreeFlightConfig, expire_frames: u64) -> Result<Self> {
        schedule.validate()?;
        schedule.require(HEAD_MODULE)?;
        schedule.require(SKELETON_MODULE)?;
        if expire_frames == 0 {
            return Err(Error::Config("expire_frames must be >= 1".into()));
        }
        Ok(FilterBank {
            params,
            schedule,
            expire_frames,
            filters: BTreeMap::new(),
            last_seen: BTreeMap::new(),
            last_frame: None,
            dropped: 0,
        })
    }

    /// Observations that arrived for tracks not live in their frame.
    pub fn dropped_observations(&self) -> u64 {
        self.dropped
    }

    pub fn live_keys(&self) -> impl Iterator<Item = &FilterKey> {
        self.filters.keys()
    }

    pub fn schedule(&self) -> &FreeFlightConfig {
        &self.schedule
    }

    /// Processes one frame and returns the post-step value of every live key,
    /// ordered by key.
    ///
    /// Observations whose module is not scheduled on this frame are ignored;
    /// observations for tracks missing from `live_tracks` are dropped and
    /// counted.
    pub fn on_frame(
        &mut self,
        frame: FrameStamp,
        live_tracks: &[TrackId],
        observations: &[(TrackId, AttributeObservation)],
    ) -> Result<Vec<BankOutput>> {
        if let Some(last) = self.last_frame {
            if frame.frame_index <= last.frame_index {
                return Err(Error::Ordering { got: frame.frame_index, last: last.frame_index });
            }
            if frame.time < last.time {
                return Err(Error::TimeRegression { t: frame.time, last: last.time });
            }
        }
        self.last_frame = Some(frame);
        let f = frame.frame_index;

        let live: BTreeSet<TrackId> = live_tracks.iter().copied().collect();
        for id in &live {
            self.last_seen.insert(*id, f);
        }
        let expire = self.expire_frames;
        let expired: BTreeSet<TrackId> =
            self.last_seen.iter().filter(|(_, &seen)| f - seen >= expire).map(|(id, _)| *id).collect();
        self.last_seen.retain(|id, _| !expired.contains(id));
        self.filters.retain(|k, _| !expired.contains(&k.track_id));

        let mut pending: BTreeMap<FilterKey, AttrValue> = BTreeMap::new();
        for (id, obs) in observations {
            if !live.contains(id) {
                self.dropped += 1;
                continue;
            }
            if !should_observe(module_of(obs), f, &self.schedule)? {
                continue;
            }
            match obs {
                AttributeObservation::Angular(theta) => {
                    pending
                        .insert(FilterKey { track_id: *id, channel: Channel::Head }, AttrValue::Angle(theta.degrees()));
                }
                AttributeObservation::Skeleton(skel) => {
                    for joint in JointName::ALL {
                        if let Some(p) = skel.joint(joint) {
                            pending.insert(
                                FilterKey { track_id: *id, channel: Channel::Joint(joint) },
                                AttrValue::Point(p),
                            );
                        }
                    }
                }
            }
        }

        let t = frame.time;
        let observed: BTreeSet<FilterKey> = pending.keys().copied().collect();
        for (key, filter) in self.filters.iter_mut() {
            let params = self.params.get(key.channel);
            *filter = match (*filter, pending.remove(key)) {
                (ChannelFilter::Angular(s), Some(AttrValue::Angle(z))) => {
                    ChannelFilter::Angular(s.update(z, t, params)?)
                }
                (ChannelFilter::Angular(s), None) => ChannelFilter::Angular(s.predict(t)?),
                (ChannelFilter::Point(s), Some(AttrValue::Point(z))) => ChannelFilter::Point(s.update(z, t, params)?),
                (ChannelFilter::Point(s), None) => ChannelFilter::Point(s.predict(t)?),
                _ => unreachable!("channel kind is fixed per key"),
            };
        }
        // whatever is still pending has no filter yet
        for (key, z) in pending {
            let filter = match z {
                AttrValue::Angle(z) => ChannelFilter::Angular(AngularGHState::init(z, t)?),
                AttrValue::Point(z) => ChannelFilter::Point(PointGHState::init(z, t)?),
            };
            self.filters.insert(key, filter);
        }
        Ok(self
            .filters
            .iter()
            .map(|(key, filter)| BankOutput { key: *key, value: filter.value(), observed: observed.contains(key) })
            .collect())
    }
}
