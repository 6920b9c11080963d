//! Evaluation measures: angular offset and PCO for head orientation,
//! positional offset and PCKh for joints, CLEAR MOT for tracking.

pub mod attr;
pub mod clear;

use crate::error::{Error, Result};

pub use attr::{AttrEvaluation, AttrReport, ChannelReport, ChannelSelector, EvalContext, Source};
pub use clear::{clear, clear_scenario, ClearOutcome, ClearReport, Correspondence};

/// Default PCO threshold: one eighth of a full turn.
pub const PCO_THRESHOLD_DEG: f64 = 45.0;

/// PCKh threshold as a fraction of head size.
pub const PCKH_FRACTION: f64 = 0.5;

/// Fraction of absolute angular errors at or below `threshold` degrees.
pub fn pco(errors: &[f64], threshold: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::UndefinedMetric("PCO over zero samples".into()));
    }
    let hits = errors.iter().filter(|e| e.abs() <= threshold).count();
    Ok(hits as f64 / errors.len() as f64)
}

/// Whether a keypoint with Euclidean error `error` counts as correct for a
/// ground-truth head of size `head_size`.
pub fn pckh_correct(error: f64, head_size: f64) -> Result<bool> {
    if !(head_size.is_finite() && head_size > 0.0) {
        return Err(Error::Data(format!("head_size must be positive, got {head_size}")));
    }
    Ok(error <= PCKH_FRACTION * head_size)
}

/// Fraction of `(error, head_size)` pairs that are correct under PCKh.
pub fn pckh(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::UndefinedMetric("PCKh over zero samples".into()));
    }
    let mut hits = 0usize;
    for &(err, size) in samples {
        if pckh_correct(err, size)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.len() as f64)
}

pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::UndefinedMetric("mean over zero samples".into()));
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}
