//! Declarative scenario specifications, read from TOML.
//!
//! ```toml
//! fps = 30.0
//! frames = 300
//! width = 640.0
//! height = 480.0
//!
//! [[persons]]
//! entry = 0
//! exit = 300
//! start = [50.0, 150.0]      # bbox top-left, px
//! size = [80.0, 160.0]       # bbox w, h, px
//! motion = [{ frames = 300, velocity = [40.0, 0.0] }]   # px/s
//! head = { initial = 0.0, segments = [{ frames = 300, rate = 30.0 }] }  # deg/s
//!
//! [noise.head]
//! sigma = 20.0
//! ```
//!
//! Omitted noise fields default to zero, omitted articulation to the
//! built-in joint motion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::JointName;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default = "default_fps")]
    pub fps: f64,
    pub frames: u64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_height")]
    pub height: f64,
    /// How far (px) a visible ground-truth joint may lie outside its bbox.
    #[serde(default = "default_margin")]
    pub joint_margin: f64,
    pub persons: Vec<PersonSpec>,
    #[serde(default)]
    pub noise: NoiseSpec,
}

fn default_fps() -> f64 {
    30.0
}
fn default_width() -> f64 {
    640.0
}
fn default_height() -> f64 {
    480.0
}
fn default_margin() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonSpec {
    pub entry: u64,
    /// First frame the person is gone.
    pub exit: u64,
    pub start: [f64; 2],
    pub size: [f64; 2],
    pub motion: Vec<MotionSegment>,
    pub head: HeadSpec,
    #[serde(default)]
    pub articulation: Articulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionSegment {
    pub frames: u64,
    /// bbox velocity, px/s.
    pub velocity: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadSpec {
    pub initial: f64,
    pub segments: Vec<HeadSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadSegment {
    pub frames: u64,
    /// Angular velocity, deg/s.
    pub rate: f64,
}

/// Sinusoidal joint motion around the template pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Articulation {
    /// Per-joint amplitude in px, in [`JointName::ALL`] order.
    pub amplitude: [f64; 8],
    /// Per-joint period in seconds.
    pub period: [f64; 8],
}

impl Default for Articulation {
    fn default() -> Self {
        Articulation {
            amplitude: [1.0, 0.5, 1.0, 1.0, 3.0, 3.0, 8.0, 8.0],
            period: [3.0, 3.0, 2.5, 2.5, 2.0, 2.0, 1.6, 1.6],
        }
    }
}

/// Joint positions as fractions of the bbox (u of width, v of height).
pub const SKELETON_TEMPLATE: [[f64; 2]; 8] =
    [[0.50, 0.15], [0.50, 0.30], [0.28, 0.36], [0.72, 0.36], [0.22, 0.60], [0.78, 0.60], [0.25, 0.85], [0.75, 0.85]];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub detector: DetectorNoise,
    pub head: HeadNoise,
    pub skeleton: SkeletonNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorNoise {
    pub miss_prob: f64,
    /// Mean number of false-positive boxes per frame.
    pub fp_rate: f64,
    pub center_sigma: f64,
    pub size_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeadNoise {
    /// Gaussian angular noise, degrees.
    pub sigma: f64,
    /// Probability that an observation is replaced by a uniform angle.
    pub outlier_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkeletonNoise {
    /// Per-joint positional noise per axis, px.
    pub sigma: [f64; 8],
    pub dropout: [f64; 8],
}

fn prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must lie in [0, 1], got {p}")))
    }
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must be finite and >= 0, got {x}")))
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        prob("detector.miss_prob", self.detector.miss_prob)?;
        non_negative("detector.fp_rate", self.detector.fp_rate)?;
        non_negative("detector.center_sigma", self.detector.center_sigma)?;
        non_negative("detector.size_sigma", self.detector.size_sigma)?;
        non_negative("head.sigma", self.head.sigma)?;
        prob("head.outlier_prob", self.head.outlier_prob)?;
        for j in JointName::ALL {
            non_negative(&format!("skeleton.sigma[{j}]"), self.skeleton.sigma[j.index()])?;
            prob(&format!("skeleton.dropout[{j}]"), self.skeleton.dropout[j.index()])?;
        }
        Ok(())
    }
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| Error::Validation(format!("spec: {e}")))?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    /// Static checks; per-frame geometry is checked during generation.
    pub fn validate(&self) -> Result<()> {
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::Validation(format!("fps must be positive, got {}", self.fps)));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::Validation("image size must be positive".into()));
        }
        non_negative("joint_margin", self.joint_margin)?;
        self.noise.validate()?;
        for (i, p) in self.persons.iter().enumerate() {
            let who = format!("person {}", i + 1);
            if p.exit <= p.entry || p.exit > self.frames {
                return Err(Error::Validation(format!(
                    "{who}: lifetime [{}, {}) must be non-empty and within {} frames",
                    p.entry, p.exit, self.frames
                )));
            }
            if !(p.size[0] > 0.0 && p.size[1] > 0.0) {
                return Err(Error::Validation(format!("{who}: bbox size must be positive")));
            }
            let life = p.exit - p.entry;
            let moved: u64 = p.motion.iter().map(|s| s.frames).sum();
            if moved != life {
                return Err(Error::Validation(format!(
                    "{who}: motion segments cover {moved} frames, lifetime is {life}"
                )));
            }
            let turned: u64 = p.head.segments.iter().map(|s| s.frames).sum();
            if turned != life {
                return Err(Error::Validation(format!(
                    "{who}: head segments cover {turned} frames, lifetime is {life}"
                )));
            }
            if !p.head.initial.is_finite() || p.head.segments.iter().any(|s| !s.rate.is_finite()) {
                return Err(Error::Validation(format!("{who}: head angles must be finite")));
            }
            for j in JointName::ALL {
                non_negative(&format!("{who}: amplitude[{j}]"), p.articulation.amplitude[j.index()])?;
                if !(p.articulation.period[j.index()] > 0.0) {
                    return Err(Error::Validation(format!("{who}: period[{j}] must be positive")));
                }
            }
        }
        Ok(())
    }
}
