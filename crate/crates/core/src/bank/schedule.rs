//! Stride/phase scheduling of analysis modules ("free flight").

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEAD_MODULE: &str = "head";
pub const SKELETON_MODULE: &str = "skeleton";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSchedule {
    pub stride: u64,
    /// Frame offset within the stride. Left unset, a module gets its
    /// position among the configured modules modulo its stride.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<u64>,
}

impl ModuleSchedule {
    pub fn every(stride: u64) -> Self {
        ModuleSchedule { stride, phase: None }
    }

    pub fn with_phase(stride: u64, phase: u64) -> Self {
        ModuleSchedule { stride, phase: Some(phase) }
    }
}

/// Per-module stride and phase, keyed by module name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreeFlightConfig {
    modules: BTreeMap<String, ModuleSchedule>,
}

impl Default for FreeFlightConfig {
    fn default() -> Self {
        FreeFlightConfig::uniform(1)
    }
}

impl FreeFlightConfig {
    pub fn new(modules: impl IntoIterator<Item = (String, ModuleSchedule)>) -> Result<Self> {
        let cfg = FreeFlightConfig { modules: modules.into_iter().collect() };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Head and skeleton modules on the same stride, staggered.
    pub fn uniform(stride: u64) -> Self {
        FreeFlightConfig::pipeline(stride, stride)
    }

    pub fn pipeline(head_stride: u64, skeleton_stride: u64) -> Self {
        let mut modules = BTreeMap::new();
        modules.insert(HEAD_MODULE.to_string(), ModuleSchedule::every(head_stride));
        modules.insert(SKELETON_MODULE.to_string(), ModuleSchedule::every(skeleton_stride));
        FreeFlightConfig { modules }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in &self.modules {
            if m.stride == 0 {
                return Err(Error::Config(format!("module `{name}`: stride must be >= 1")));
            }
            if let Some(p) = m.phase {
                if p >= m.stride {
                    return Err(Error::Config(format!("module `{name}`: phase {p} must be below stride {}", m.stride)));
                }
            }
        }
        Ok(())
    }

    pub fn require(&self, module: &str) -> Result<()> {
        self.modules
            .contains_key(module)
            .then_some(())
            .ok_or_else(|| Error::Config(format!("unknown analysis module `{module}`")))
    }

    pub fn set(&mut self, module: &str, schedule: ModuleSchedule) -> Result<()> {
        self.modules.insert(module.to_string(), schedule);
        self.validate()
    }

    pub fn modules(&self) -> impl Iterator<Item = &str> {
        self.modules.keys().map(String::as_str)
    }

    /// `(stride, phase)` of a module with the default stagger applied.
    pub fn resolved(&self, module: &str) -> Result<(u64, u64)> {
        let (index, (_, m)) = self
            .modules
            .iter()
            .enumerate()
            .find(|(_, (name, _))| name.as_str() == module)
            .ok_or_else(|| Error::Config(format!("unknown analysis module `{module}`")))?;
        let phase = m.phase.unwrap_or(index as u64 % m.stride);
        Ok((m.stride, phase))
    }

    /// Copy with every default phase written out explicitly.
    pub fn with_resolved_phases(&self) -> Self {
        let modules = self
            .modules
            .keys()
            .map(|name| {
                let (stride, phase) = self.resolved(name).expect("module exists");
                (name.clone(), ModuleSchedule::with_phase(stride, phase))
            })
            .collect();
        FreeFlightConfig { modules }
    }
}

/// Whether `module` runs at `frame_index`: `frame_index mod stride == phase`.
pub fn should_observe(module: &str, frame_index: u64, config: &FreeFlightConfig) -> Result<bool> {
    let (stride, phase) = config.resolved(module)?;
    Ok(frame_index % stride == phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(entries: &[(&str, u64, u64)]) -> FreeFlightConfig {
        FreeFlightConfig::new(entries.iter().map(|(n, s, p)| (n.to_string(), ModuleSchedule::with_phase(*s, *p))))
            .unwrap()
    }

    #[test]
    fn stride_one_observes_every_frame() {
        let c = cfg(&[("a", 1, 0)]);
        assert!((0..100).all(|f| should_observe("a", f, &c).unwrap()));
    }

    #[test]
    fn stride_two_alternates() {
        let c = cfg(&[("a", 2, 0)]);
        let got: Vec<bool> = (0..5).map(|f| should_observe("a", f, &c).unwrap()).collect();
        assert_eq!(got, vec![true, false, true, false, true]);
    }

    #[test]
    fn staggered_modules_never_coincide() {
        let c = cfg(&[("a", 2, 0), ("b", 2, 1)]);
        for f in 0..100 {
            let a = should_observe("a", f, &c).unwrap();
            let b = should_observe("b", f, &c).unwrap();
            assert!(a ^ b);
        }
    }

    #[test]
    fn default_stagger_is_round_robin() {
        let c = FreeFlightConfig::uniform(2);
        assert_eq!(c.resolved(HEAD_MODULE).unwrap(), (2, 0));
        assert_eq!(c.resolved(SKELETON_MODULE).unwrap(), (2, 1));
        let c = FreeFlightConfig::pipeline(3, 1);
        assert_eq!(c.resolved(SKELETON_MODULE).unwrap(), (1, 0));
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(FreeFlightConfig::new([("a".to_string(), ModuleSchedule::every(0))]).is_err());
        assert!(FreeFlightConfig::new([("a".to_string(), ModuleSchedule::with_phase(3, 3))]).is_err());
        let c = FreeFlightConfig::uniform(1);
        assert!(matches!(should_observe("gaze", 0, &c), Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn schedule_density(n in 0u64..500, stride in 1u64..12, phase_seed in 0u64..1000) {
            let phase = phase_seed % stride;
            let c = cfg(&[("m", stride, phase)]);
            let taken = (0..n).filter(|&f| should_observe("m", f, &c).unwrap()).count() as u64;
            let expected = if n > phase { (n - phase).div_ceil(stride) } else { 0 };
            prop_assert_eq!(taken, expected);
        }
    }
}
