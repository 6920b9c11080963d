//! Parameter sweeps and free-flight comparisons over one tracked scenario.
//!
//! Both experiments track the scenario once and re-run only the filter bank
//! per configuration, so every cell is scored on the same correspondences.

use crate::bank::{ChannelParams, CostMeter, CostModel, FreeFlightConfig};
use crate::error::{Error, Result};
use crate::ghfilter::GHParams;
use crate::metrics::clear::DEFAULT_IOU_THRESHOLD;
use crate::metrics::{clear, ChannelReport, ChannelSelector, EvalContext, Source};
use crate::pipeline::{filter_tracks, track, RunConfig};
use crate::scenario::{Scenario, TrackRecord};
use crate::types::{BBox, TrackId};

/// A scenario tracked once and matched against its ground truth.
#[derive(Debug, Clone)]
pub struct Prepared<'a> {
    pub scenario: &'a Scenario,
    pub tracks: Vec<TrackRecord>,
    pub context: EvalContext,
}

pub fn prepare<'a>(s: &'a Scenario, config: &RunConfig) -> Result<Prepared<'a>> {
    config.validate()?;
    let tracks = track(s, &config.tracker)?;
    let gt: Vec<(u64, u32, BBox)> = s.gt.iter().map(|r| (r.frame.frame_index, r.gt_person_id, r.bbox)).collect();
    let hyp: Vec<(u64, TrackId, BBox)> = tracks.iter().map(|r| (r.frame, r.track_id, r.bbox)).collect();
    let outcome = clear(&gt, &hyp, s.frames, DEFAULT_IOU_THRESHOLD)?;
    let mut with_tracks = s.inputs_only();
    with_tracks.tracks = tracks.clone();
    let context = EvalContext::new(&with_tracks, &outcome.correspondences)?;
    Ok(Prepared { scenario: s, tracks, context })
}

impl Prepared<'_> {
    /// Filtered report of `selector` under the given gains and schedule.
    pub fn score(
        &self,
        selector: &ChannelSelector,
        params: &ChannelParams,
        schedule: &FreeFlightConfig,
        expire_frames: u64,
    ) -> Result<ChannelReport> {
        let run = filter_tracks(self.scenario, &self.tracks, params, schedule, expire_frames)?;
        self.context.evaluate(&run.attrs)?.report(selector, Source::Filtered)
    }

    pub fn raw(&self, selector: &ChannelSelector) -> Result<ChannelReport> {
        self.context.evaluate(&[])?.report(selector, Source::Raw)
    }
}

fn with_gains(base: &ChannelParams, selector: &ChannelSelector, gains: GHParams) -> ChannelParams {
    let mut p = *base;
    for c in selector.channels() {
        p.set(c, gains);
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub g: f64,
    pub h: f64,
    pub report: ChannelReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub raw: ChannelReport,
    /// Row-major over `(g, h)` in grid order.
    pub cells: Vec<SweepCell>,
    /// Index of the cell with the highest score; ties go to the lower mean
    /// offset, then to the earlier cell.
    pub best: usize,
}

/// Parses `a,b,c` or `start:stop:step` (inclusive) into a grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::Validation(format!("grid `{text}`: {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(bad("need start <= stop and step > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as u64;
            // decimal rounding keeps 0.1-steps exact (0.3, not 0.30000000000000004)
            (0..=n).map(|i| crate::scenario::quantize(start + i as f64 * step)).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected a comma list or start:stop:step")),
    };
    if grid.is_empty() {
        return Err(bad("empty"));
    }
    Ok(grid)
}

/// Scores every `(g, h)` cell on `selector`, all other channels keeping the
/// gains of `config.filter`.
pub fn sweep(
    prepared: &Prepared<'_>,
    config: &RunConfig,
    selector: &ChannelSelector,
    g_grid: &[f64],
    h_grid: &[f64],
) -> Result<SweepResult> {
    if g_grid.is_empty() || h_grid.is_empty() {
        return Err(Error::Validation("sweep grids must be non-empty".into()));
    }
    let mut gains = Vec::new();
    for &g in g_grid {
        for &h in h_grid {
            gains.push(GHParams::new(g, h).map_err(|e| Error::Validation(format!("grid cell (g={g}, h={h}): {e}")))?);
        }
    }
    let mut cells = Vec::with_capacity(gains.len());
    for gh in gains {
        let params = with_gains(&config.filter, selector, gh);
        let report = prepared.score(selector, &params, &config.freeflight, config.expire_frames)?;
        cells.push(SweepCell { g: gh.g(), h: gh.h(), report });
    }
    let mut best = 0;
    for (i, c) in cells.iter().enumerate() {
        let b = &cells[best].report;
        if c.report.score > b.score || (c.report.score == b.score && c.report.mean_offset < b.mean_offset) {
            best = i;
        }
    }
    Ok(SweepResult { raw: prepared.raw(selector)?, cells, best })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeFlightRow {
    pub stride: u64,
    pub keep: ChannelReport,
    pub predict: ChannelReport,
    pub model_hz: f64,
    /// From per-frame accounting over the scenario's frames.
    pub measured_hz: f64,
}

/// Keep (g=1, h=0) against the configured gains, with every module on the
/// same stride, for each stride.
pub fn freeflight(
    prepared: &Prepared<'_>,
    config: &RunConfig,
    selector: &ChannelSelector,
    strides: &[u64],
    cost: &CostModel,
) -> Result<Vec<FreeFlightRow>> {
    if strides.is_empty() {
        return Err(Error::Validation("no strides given".into()));
    }
    let keep = with_gains(&config.filter, selector, GHParams::keep());
    strides
        .iter()
        .map(|&stride| {
            if stride == 0 {
                return Err(Error::Validation("strides must be >= 1".into()));
            }
            let schedule = FreeFlightConfig::uniform(stride);
            let mut meter = CostMeter::new(schedule.clone(), cost.clone())?;
            for f in 0..prepared.scenario.frames {
                meter.charge(f)?;
            }
            let summary = meter.summarize_throughput()?;
            Ok(FreeFlightRow {
                stride,
                keep: prepared.score(selector, &keep, &schedule, config.expire_frames)?,
                predict: prepared.score(selector, &config.filter, &schedule, config.expire_frames)?,
                model_hz: summary.model_hz,
                measured_hz: summary.effective_hz,
            })
        })
        .collect()
}
