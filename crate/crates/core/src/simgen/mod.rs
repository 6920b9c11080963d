//! Deterministic synthetic scenarios.
//!
//! Ground truth comes from piecewise-constant bbox and head-rotation
//! velocities plus a sinusoidally articulated joint template. Detections and
//! analysis-module outputs are ground truth passed through the noise model
//! in [`NoiseSpec`]. Observations are emitted for every person in every
//! frame; which of them a run consumes is up to the scheduler.
//!
//! Ground-truth `head_size` is twice the head-to-neck joint distance.

mod generate;
pub mod presets;
pub mod spec;

pub use generate::generate;
pub use presets::{deboarding, preset, turning_head, PRESETS};
pub use spec::{
    Articulation, DetectorNoise, HeadNoise, HeadSegment, HeadSpec, MotionSegment, NoiseSpec, PersonSpec, ScenarioSpec,
    SkeletonNoise, SKELETON_TEMPLATE,
};
