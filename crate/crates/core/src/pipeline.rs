//! End-to-end processing of a scenario: tracking, scheduled analysis on
//! track crops, per-track filtering and cost accounting.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bank::{
    should_observe, ChannelParams, CostMeter, CostModel, FilterBank, FreeFlightConfig, ThroughputSummary,
    DEFAULT_EXPIRE_FRAMES, HEAD_MODULE, SKELETON_MODULE,
};
use crate::emulate::ObservationIndex;
use crate::error::{Error, Result};
use crate::scenario::{AttrRecord, Scenario, TrackRecord};
use crate::tracker::{Tracker, TrackerConfig};
use crate::types::{AttributeObservation, BBox, HeadOrientation, TrackId};

/// Everything that parameterizes a run besides its input scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub expire_frames: u64,
    /// Additionally time the emulated module calls on the wall clock. The
    /// result is reported separately and never written to scenario output.
    pub wall_clock: bool,
    pub tracker: TrackerConfig,
    pub filter: ChannelParams,
    pub freeflight: FreeFlightConfig,
    pub cost: CostModel,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            expire_frames: DEFAULT_EXPIRE_FRAMES,
            wall_clock: false,
            tracker: TrackerConfig::default(),
            filter: ChannelParams::default(),
            freeflight: FreeFlightConfig::default(),
            cost: CostModel::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.expire_frames == 0 {
            return Err(Error::Config("expire_frames must be >= 1".into()));
        }
        self.tracker.validate()?;
        self.freeflight.validate()?;
        self.freeflight.require(HEAD_MODULE)?;
        self.freeflight.require(SKELETON_MODULE)?;
        self.cost.validate()?;
        CostMeter::new(self.freeflight.clone(), self.cost.clone())?;
        Ok(())
    }
}

fn check_scenario(s: &Scenario) -> Result<()> {
    if !(s.fps.is_finite() && s.fps > 0.0) {
        return Err(Error::Validation(format!("scenario fps must be positive, got {}", s.fps)));
    }
    let frames = [
        s.detections.iter().map(|r| r.frame).max(),
        s.head_obs.iter().map(|r| r.frame).max(),
        s.skel_obs.iter().map(|r| r.frame).max(),
        s.gt.iter().map(|r| r.frame.frame_index).max(),
    ];
    if let Some(f) = frames.into_iter().flatten().max() {
        if f >= s.frames {
            return Err(Error::Validation(format!(
                "scenario declares {} frames but has records at frame {f}",
                s.frames
            )));
        }
    }
    Ok(())
}

fn detections_by_frame(s: &Scenario) -> Vec<Vec<BBox>> {
    let mut out = vec![Vec::new(); s.frames as usize];
    for d in &s.detections {
        out[d.frame as usize].push(d.bbox);
    }
    out
}

/// Runs the tracker over the scenario's detections.
pub fn track(s: &Scenario, config: &TrackerConfig) -> Result<Vec<TrackRecord>> {
    check_scenario(s)?;
    let mut tracker = Tracker::new(*config)?;
    let mut out = Vec::new();
    for (f, dets) in detections_by_frame(s).iter().enumerate() {
        let f = f as u64;
        for (track_id, bbox) in tracker.tick(f, dets)? {
            out.push(TrackRecord { frame: f, track_id, bbox });
        }
    }
    Ok(out)
}

/// Filtered attribute stream of a run, plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterRun {
    pub attrs: Vec<AttrRecord>,
    pub dropped_observations: u64,
    /// Emulated module invocations, per module.
    pub head_calls: u64,
    pub skeleton_calls: u64,
    /// Seconds spent inside emulated module calls.
    pub wall_seconds: f64,
}

/// Feeds tracker output through the scheduled modules and the filter bank.
///
/// `tracks` must come from [`track`] (or an equivalent stream) over `s`.
pub fn filter_tracks(
    s: &Scenario,
    tracks: &[TrackRecord],
    params: &ChannelParams,
    schedule: &FreeFlightConfig,
    expire_frames: u64,
) -> Result<FilterRun> {
    check_scenario(s)?;
    let index = ObservationIndex::new(s);
    let mut bank = FilterBank::new(*params, schedule.clone(), expire_frames)?;
    let mut per_frame: Vec<Vec<(TrackId, BBox)>> = vec![Vec::new(); s.frames as usize];
    for t in tracks {
        per_frame
            .get_mut(t.frame as usize)
            .ok_or_else(|| Error::Validation(format!("track record at frame {} outside the scenario", t.frame)))?
            .push((t.track_id, t.bbox));
    }

    let mut run =
        FilterRun { attrs: Vec::new(), dropped_observations: 0, head_calls: 0, skeleton_calls: 0, wall_seconds: 0.0 };
    for (f, live) in per_frame.iter().enumerate() {
        let f = f as u64;
        let run_head = should_observe(HEAD_MODULE, f, schedule)?;
        let run_skel = should_observe(SKELETON_MODULE, f, schedule)?;
        let mut observations = Vec::new();
        let started = Instant::now();
        for (id, bbox) in live {
            if !(run_head || run_skel) {
                break;
            }
            let Some(obs) = index.observe(f, bbox) else { continue };
            if run_head {
                run.head_calls += 1;
                if let Some(theta) = obs.head {
                    observations.push((*id, AttributeObservation::Angular(HeadOrientation::new(theta)?)));
                }
            }
            if run_skel {
                run.skeleton_calls += 1;
                if let Some(skel) = obs.skeleton {
                    observations.push((*id, AttributeObservation::Skeleton(skel)));
                }
            }
        }
        run.wall_seconds += started.elapsed().as_secs_f64();

        let ids: Vec<TrackId> = live.iter().map(|(id, _)| *id).collect();
        for out in bank.on_frame(s.stamp(f), &ids, &observations)? {
            run.attrs.push(AttrRecord {
                frame: f,
                track_id: out.key.track_id,
                channel: out.key.channel,
                value: out.value,
                observed: out.observed,
            });
        }
    }
    run.dropped_observations = bank.dropped_observations();
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Input streams plus `trk` and `trk-attr` records.
    pub scenario: Scenario,
    pub throughput: ThroughputSummary,
    /// Frames per second of wall-clock time spent in module calls, when
    /// requested.
    pub wall_clock_hz: Option<f64>,
    pub dropped_observations: u64,
}

/// Tracks, filters and accounts a whole scenario. Existing outputs in `s`
/// are replaced.
pub fn run(s: &Scenario, config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let tracks = track(s, &config.tracker)?;
    let filtered = filter_tracks(s, &tracks, &config.filter, &config.freeflight, config.expire_frames)?;

    let mut meter = CostMeter::new(config.freeflight.clone(), config.cost.clone())?;
    for f in 0..s.frames {
        meter.charge(f)?;
    }
    let wall_clock_hz = config.wall_clock.then(|| {
        if filtered.wall_seconds > 0.0 {
            s.frames as f64 / filtered.wall_seconds
        } else {
            f64::INFINITY
        }
    });

    let mut out = s.inputs_only();
    out.tracks = tracks;
    out.attrs = filtered.attrs;
    Ok(RunOutput {
        scenario: out,
        throughput: meter.summarize_throughput()?,
        wall_clock_hz,
        dropped_observations: filtered.dropped_observations,
    })
}
