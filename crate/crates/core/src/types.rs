//! Value types shared across the pipeline.

use std::fmt;
use std::str::FromStr;

use crate::angle::wrap_angle;
use crate::error::{Error, Result};

/// Position of a frame in a scenario: dense index plus timestamp in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStamp {
    pub frame_index: u64,
    pub time: f64,
}

impl FrameStamp {
    /// Stamp of frame `index` in a stream sampled at `fps`.
    pub fn at(index: u64, fps: f64) -> Self {
        FrameStamp { frame_index: index, time: index as f64 / fps }
    }
}

/// Identity assigned by the tracker to one trajectory hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrackId(u32);

impl TrackId {
    pub fn new(id: u32) -> Result<Self> {
        if id == 0 {
            return Err(Error::InvalidArgument("track id must be positive".into()));
        }
        Ok(TrackId(id))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Axis-aligned box in pixels, top-left anchored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(Error::InvalidArgument("bbox fields must be finite".into()));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidArgument(format!("bbox must have positive size, got {w}x{h}")));
        }
        Ok(BBox { x, y, w, h })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + 0.5 * self.w, self.y + 0.5 * self.h)
    }

    /// Intersection over union; 0 for disjoint boxes.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let iy = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        if ix <= 0.0 || iy <= 0.0 {
            return 0.0;
        }
        let inter = ix * iy;
        inter / (self.area() + other.area() - inter)
    }
}

/// A head orientation in degrees, always canonical in `(-180, 180]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadOrientation(f64);

impl HeadOrientation {
    pub fn new(theta: f64) -> Result<Self> {
        wrap_angle(theta).map(HeadOrientation)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }
}

/// The eight annotated upper-body joints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JointName {
    Head,
    Neck,
    LShoulder,
    RShoulder,
    LElbow,
    RElbow,
    LWrist,
    RWrist,
}

impl JointName {
    pub const ALL: [JointName; 8] = [
        JointName::Head,
        JointName::Neck,
        JointName::LShoulder,
        JointName::RShoulder,
        JointName::LElbow,
        JointName::RElbow,
        JointName::LWrist,
        JointName::RWrist,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JointName::Head => "head",
            JointName::Neck => "neck",
            JointName::LShoulder => "l_shoulder",
            JointName::RShoulder => "r_shoulder",
            JointName::LElbow => "l_elbow",
            JointName::RElbow => "r_elbow",
            JointName::LWrist => "l_wrist",
            JointName::RWrist => "r_wrist",
        }
    }
}

impl fmt::Display for JointName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for JointName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        JointName::ALL
            .into_iter()
            .find(|j| j.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown joint `{s}`")))
    }
}

/// Image-space point in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub u: f64,
    pub v: f64,
}

impl Point2 {
    pub fn new(u: f64, v: f64) -> Self {
        Point2 { u, v }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// Eight optional joint positions; `None` means the joint is not visible.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SkeletonObservation {
    joints: [Option<Point2>; 8],
}

impl SkeletonObservation {
    pub fn new(joints: [Option<Point2>; 8]) -> Self {
        SkeletonObservation { joints }
    }

    pub fn joint(&self, joint: JointName) -> Option<Point2> {
        self.joints[joint.index()]
    }

    pub fn is_visible(&self, joint: JointName) -> bool {
        self.joints[joint.index()].is_some()
    }

    pub fn set(&mut self, joint: JointName, point: Option<Point2>) {
        self.joints[joint.index()] = point;
    }

    pub fn joints(&self) -> &[Option<Point2>; 8] {
        &self.joints
    }
}

/// One analysis-module output for one track in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttributeObservation {
    Angular(HeadOrientation),
    Skeleton(SkeletonObservation),
}

/// Annotated ground truth for one person in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthRecord {
    pub frame: FrameStamp,
    pub gt_person_id: u32,
    pub bbox: BBox,
    pub head_theta: f64,
    pub skeleton: SkeletonObservation,
    pub head_size: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_names_round_trip() {
        assert_eq!(JointName::ALL.len(), 8);
        for (i, j) in JointName::ALL.into_iter().enumerate() {
            assert_eq!(j.index(), i);
            assert_eq!(j.as_str().parse::<JointName>().unwrap(), j);
        }
        assert!("ankle".parse::<JointName>().is_err());
    }

    #[test]
    fn iou_cases() {
        let a = BBox::new(0.0, 0.0, 10.0, 10.0).unwrap();
        let b = BBox::new(5.0, 0.0, 10.0, 10.0).unwrap();
        let c = BBox::new(20.0, 20.0, 5.0, 5.0).unwrap();
        assert_eq!(a.iou(&a), 1.0);
        assert!((a.iou(&b) - 50.0 / 150.0).abs() < 1e-15);
        assert_eq!(a.iou(&c), 0.0);
        assert_eq!(a.iou(&b), b.iou(&a));
    }

    #[test]
    fn bbox_rejects_degenerate() {
        assert!(BBox::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BBox::new(0.0, 0.0, 1.0, -1.0).is_err());
        assert!(BBox::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn head_orientation_is_canonical() {
        assert_eq!(HeadOrientation::new(-180.0).unwrap().degrees(), 180.0);
        assert_eq!(HeadOrientation::new(370.0).unwrap().degrees(), 10.0);
        assert!(TrackId::new(0).is_err());
    }
}
