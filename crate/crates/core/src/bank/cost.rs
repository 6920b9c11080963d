//! Deterministic compute-cost accounting for scheduled analysis modules.
//!
//! Every frame pays a fixed pipeline overhead `f`, plus `c_m` for each
//! module `m` that runs on it. For a single module on stride `s` the
//! throughput is `1 / (f + c/s)`, which saturates at `1/f`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::schedule::{should_observe, FreeFlightConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    /// Seconds per frame spent outside the analysis modules.
    pub fixed_per_frame: f64,
    /// Seconds per invocation of each analysis module.
    pub per_call: BTreeMap<String, f64>,
}

impl Default for CostModel {
    fn default() -> Self {
        // 1 ms overhead; both modules 9 ms per call
        CostModel {
            fixed_per_frame: 0.001,
            per_call: [("head".to_string(), 0.009), ("skeleton".to_string(), 0.009)].into_iter().collect(),
        }
    }
}

impl CostModel {
    pub fn new(fixed_per_frame: f64, per_call: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let m = CostModel { fixed_per_frame, per_call: per_call.into_iter().collect() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.fixed_per_frame) {
            return Err(Error::Config(format!(
                "fixed_per_frame must be finite and >= 0, got {}",
                self.fixed_per_frame
            )));
        }
        for (name, c) in &self.per_call {
            if !ok(*c) {
                return Err(Error::Config(format!("cost of module `{name}` must be finite and >= 0, got {c}")));
            }
        }
        Ok(())
    }

    fn call_cost(&self, module: &str) -> Result<f64> {
        self.per_call
            .get(module)
            .copied()
            .ok_or_else(|| Error::Config(format!("no cost declared for module `{module}`")))
    }

    /// Analytic throughput `1 / (f + sum_m c_m / s_m)`.
    pub fn model_hz(&self, config: &FreeFlightConfig) -> Result<f64> {
        let mut per_frame = self.fixed_per_frame;
        for module in config.modules() {
            let (stride, _) = config.resolved(module)?;
            per_frame += self.call_cost(module)? / stride as f64;
        }
        Ok(hz(1.0, per_frame))
    }
}

fn hz(frames: f64, seconds: f64) -> f64 {
    if seconds > 0.0 {
        frames / seconds
    } else {
        f64::INFINITY
    }
}

/// Seconds charged for processing `frame_index`.
pub fn account_cost(frame_index: u64, config: &FreeFlightConfig, cost: &CostModel) -> Result<f64> {
    let mut charge = cost.fixed_per_frame;
    for module in config.modules() {
        if should_observe(module, frame_index, config)? {
            charge += cost.call_cost(module)?;
        }
    }
    Ok(charge)
}

/// Throughput of one module on stride `stride` under overhead `fixed`
/// and per-call cost `call`.
pub fn analytic_hz(fixed: f64, call: f64, stride: u64) -> f64 {
    hz(1.0, fixed + call / stride as f64)
}

/// `(f + c) / (f + c/s)`: throughput gain of stride `s` over stride 1.
pub fn analytic_speedup(fixed: f64, call: f64, stride: u64) -> f64 {
    (fixed + call) / (fixed + call / stride as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputSummary {
    pub frames: u64,
    pub total_seconds: f64,
    /// `frames / total_seconds`; infinite when nothing was charged.
    pub effective_hz: f64,
    pub model_hz: f64,
    pub calls: u64,
}

/// Running sum of per-frame charges.
#[derive(Debug, Clone)]
pub struct CostMeter {
    config: FreeFlightConfig,
    cost: CostModel,
    frames: u64,
    seconds: f64,
    calls: u64,
}

impl CostMeter {
    pub fn new(config: FreeFlightConfig, cost: CostModel) -> Result<Self> {
        config.validate()?;
        cost.validate()?;
        for module in config.modules() {
            cost.call_cost(module)?;
        }
        Ok(CostMeter { config, cost, frames: 0, seconds: 0.0, calls: 0 })
    }

    pub fn charge(&mut self, frame_index: u64) -> Result<f64> {
        let c = account_cost(frame_index, &self.config, &self.cost)?;
        for module in self.config.modules() {
            if should_observe(module, frame_index, &self.config)? {
                self.calls += 1;
            }
        }
        self.frames += 1;
        self.seconds += c;
        Ok(c)
    }

    pub fn summarize_throughput(&self) -> Result<ThroughputSummary> {
        Ok(ThroughputSummary {
            frames: self.frames,
            total_seconds: self.seconds,
            effective_hz: hz(self.frames as f64, self.seconds),
            model_hz: self.cost.model_hz(&self.config)?,
            calls: self.calls,
        })
    }
}
