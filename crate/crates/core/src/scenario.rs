//! Line-delimited scenario files.
//!
//! The first line is a header, `detta-scenario v1 fps=<float> [frames=<n>]`.
//! Every following line is one record, `<kind> <frame_index> <fields...>`,
//! with floats written to six decimals. Blank lines and lines starting with
//! `#` are ignored. Field layouts:
//!
//! ```text
//! gt       <frame> <person> <x> <y> <w> <h> <head_theta> <head_size> <joint>x8
//! det      <frame> <x> <y> <w> <h>
//! obs-head <frame> <person> <theta>
//! obs-skel <frame> <person> <joint>x8
//! trk      <frame> <track> <x> <y> <w> <h>
//! trk-attr <frame> <track> <channel> <value...> <observed:0|1>
//! ```
//!
//! A `<joint>` is `<u> <v>` in pixels or `- -` when the joint is not
//! visible; joints follow the order of [`JointName::ALL`]. `trk-attr`
//! channels are `head` (one angle value) or `skel.<joint>` (two values).
//! Within a frame, records are grouped by kind in the order listed above.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::types::{BBox, FrameStamp, GroundTruthRecord, JointName, Point2, SkeletonObservation, TrackId};

pub const FORMAT_MAGIC: &str = "detta-scenario";
pub const FORMAT_VERSION: &str = "v1";

/// A filtered attribute channel of one track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Head,
    Joint(JointName),
}

impl Channel {
    /// Head orientation first, then the joints in canonical order.
    pub const ALL: [Channel; 9] = [
        Channel::Head,
        Channel::Joint(JointName::Head),
        Channel::Joint(JointName::Neck),
        Channel::Joint(JointName::LShoulder),
        Channel::Joint(JointName::RShoulder),
        Channel::Joint(JointName::LElbow),
        Channel::Joint(JointName::RElbow),
        Channel::Joint(JointName::LWrist),
        Channel::Joint(JointName::RWrist),
    ];
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Head => f.write_str("head"),
            Channel::Joint(j) => write!(f, "skel.{j}"),
        }
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "head" {
            return Ok(Channel::Head);
        }
        match s.strip_prefix("skel.") {
            Some(joint) => Ok(Channel::Joint(joint.parse()?)),
            None => Err(Error::InvalidArgument(format!("unknown channel `{s}`"))),
        }
    }
}

/// Value of a filtered channel: degrees for the head, pixels for joints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttrValue {
    Angle(f64),
    Point(Point2),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRecord {
    pub frame: u64,
    pub bbox: BBox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadObsRecord {
    pub frame: u64,
    pub person: u32,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkelObsRecord {
    pub frame: u64,
    pub person: u32,
    pub skeleton: SkeletonObservation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRecord {
    pub frame: u64,
    pub track_id: TrackId,
    pub bbox: BBox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttrRecord {
    pub frame: u64,
    pub track_id: TrackId,
    pub channel: Channel,
    pub value: AttrValue,
    pub observed: bool,
}

/// Ground truth, emulated sensor streams and (optionally) pipeline outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub fps: f64,
    pub frames: u64,
    pub gt: Vec<GroundTruthRecord>,
    pub detections: Vec<DetectionRecord>,
    pub head_obs: Vec<HeadObsRecord>,
    pub skel_obs: Vec<SkelObsRecord>,
    pub tracks: Vec<TrackRecord>,
    pub attrs: Vec<AttrRecord>,
}

impl Scenario {
    pub fn empty(fps: f64) -> Self {
        Scenario {
            fps,
            frames: 0,
            gt: Vec::new(),
            detections: Vec::new(),
            head_obs: Vec::new(),
            skel_obs: Vec::new(),
            tracks: Vec::new(),
            attrs: Vec::new(),
        }
    }

    pub fn stamp(&self, frame: u64) -> FrameStamp {
        FrameStamp::at(frame, self.fps)
    }

    /// Copy without tracker and filter outputs.
    pub fn inputs_only(&self) -> Scenario {
        Scenario { tracks: Vec::new(), attrs: Vec::new(), ..self.clone() }
    }
}

/// Rounds to the precision the file format keeps, so in-memory values
/// survive a write/read cycle unchanged.
pub fn quantize(x: f64) -> f64 {
    let q: f64 = format!("{x:.6}").parse().expect("formatted float parses");
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

fn push_f(out: &mut String, x: f64) {
    let _ = write!(out, " {x:.6}");
}

fn push_bbox(out: &mut String, b: &BBox) {
    for x in [b.x, b.y, b.w, b.h] {
        push_f(out, x);
    }
}

fn push_skeleton(out: &mut String, s: &SkeletonObservation) {
    for p in s.joints() {
        match p {
            Some(p) => {
                push_f(out, p.u);
                push_f(out, p.v);
            }
            None => out.push_str(" - -"),
        }
    }
}

fn sorted_by_frame<T>(items: &[T], frame: impl Fn(&T) -> u64) -> Vec<&T> {
    let mut v: Vec<&T> = items.iter().collect();
    v.sort_by_key(|r| frame(r));
    v
}

/// Serializes a scenario to the text format.
pub fn to_string(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_MAGIC} {FORMAT_VERSION} fps={:.6} frames={}", s.fps, s.frames);

    let gt = sorted_by_frame(&s.gt, |r| r.frame.frame_index);
    let det = sorted_by_frame(&s.detections, |r| r.frame);
    let head = sorted_by_frame(&s.head_obs, |r| r.frame);
    let skel = sorted_by_frame(&s.skel_obs, |r| r.frame);
    let trk = sorted_by_frame(&s.tracks, |r| r.frame);
    let attr = sorted_by_frame(&s.attrs, |r| r.frame);
    let mut cursors = [0usize; 6];

    let last = [
        gt.last().map(|r| r.frame.frame_index),
        det.last().map(|r| r.frame),
        head.last().map(|r| r.frame),
        skel.last().map(|r| r.frame),
        trk.last().map(|r| r.frame),
        attr.last().map(|r| r.frame),
    ]
    .into_iter()
    .flatten()
    .max();
    let Some(last) = last else {
        return out;
    };

    for f in 0..=last {
        while let Some(r) = gt.get(cursors[0]).filter(|r| r.frame.frame_index == f) {
            let _ = write!(out, "gt {f} {}", r.gt_person_id);
            push_bbox(&mut out, &r.bbox);
            push_f(&mut out, r.head_theta);
            push_f(&mut out, r.head_size);
            push_skeleton(&mut out, &r.skeleton);
            out.push('\n');
            cursors[0] += 1;
        }
        while let Some(r) = det.get(cursors[1]).filter(|r| r.frame == f) {
            let _ = write!(out, "det {f}");
            push_bbox(&mut out, &r.bbox);
            out.push('\n');
            cursors[1] += 1;
        }
        while let Some(r) = head.get(cursors[2]).filter(|r| r.frame == f) {
            let _ = write!(out, "obs-head {f} {}", r.person);
            push_f(&mut out, r.theta);
            out.push('\n');
            cursors[2] += 1;
        }
        while let Some(r) = skel.get(cursors[3]).filter(|r| r.frame == f) {
            let _ = write!(out, "obs-skel {f} {}", r.person);
            push_skeleton(&mut out, &r.skeleton);
            out.push('\n');
            cursors[3] += 1;
        }
        while let Some(r) = trk.get(cursors[4]).filter(|r| r.frame == f) {
            let _ = write!(out, "trk {f} {}", r.track_id);
            push_bbox(&mut out, &r.bbox);
            out.push('\n');
            cursors[4] += 1;
        }
        while let Some(r) = attr.get(cursors[5]).filter(|r| r.frame == f) {
            let _ = write!(out, "trk-attr {f} {} {}", r.track_id, r.channel);
            match r.value {
                AttrValue::Angle(a) => push_f(&mut out, a),
                AttrValue::Point(p) => {
                    push_f(&mut out, p.u);
                    push_f(&mut out, p.v);
                }
            }
            let _ = writeln!(out, " {}", u8::from(r.observed));
            cursors[5] += 1;
        }
    }
    out
}

pub fn write_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_string(s)).map_err(|e| Error::io(path, e))
}

pub fn read_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_str(&text, path)
}

struct Fields<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
}

impl<'a> Fields<'a> {
    fn remaining(&self) -> usize {
        self.tokens.len() - self.pos
    }

    fn next(&mut self) -> std::result::Result<&'a str, String> {
        let t = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| format!("truncated record: expected more than {} fields", self.tokens.len()))?;
        self.pos += 1;
        Ok(t)
    }

    fn float(&mut self) -> std::result::Result<f64, String> {
        let t = self.next()?;
        let x: f64 = t.parse().map_err(|_| format!("invalid number `{t}`"))?;
        if !x.is_finite() {
            return Err(format!("non-finite number `{t}`"));
        }
        Ok(x)
    }

    fn uint<T: FromStr>(&mut self) -> std::result::Result<T, String> {
        let t = self.next()?;
        t.parse().map_err(|_| format!("invalid integer `{t}`"))
    }

    fn track(&mut self) -> std::result::Result<TrackId, String> {
        TrackId::new(self.uint()?).map_err(|e| e.to_string())
    }

    fn bbox(&mut self) -> std::result::Result<BBox, String> {
        let (x, y, w, h) = (self.float()?, self.float()?, self.float()?, self.float()?);
        BBox::new(x, y, w, h).map_err(|e| e.to_string())
    }

    fn skeleton(&mut self) -> std::result::Result<SkeletonObservation, String> {
        let mut s = SkeletonObservation::default();
        for joint in JointName::ALL {
            if self.tokens.get(self.pos) == Some(&"-") {
                self.next()?;
                if self.next()? != "-" {
                    return Err(format!("joint {joint}: half-missing point"));
                }
            } else {
                let (u, v) = (self.float()?, self.float()?);
                s.set(joint, Some(Point2::new(u, v)));
            }
        }
        Ok(s)
    }

    fn finish(&self) -> std::result::Result<(), String> {
        if self.remaining() > 0 {
            Err(format!("{} unexpected trailing fields", self.remaining()))
        } else {
            Ok(())
        }
    }
}

fn parse_header(line: &str) -> std::result::Result<(f64, Option<u64>), Error> {
    let mut it = line.split_whitespace();
    if it.next() != Some(FORMAT_MAGIC) {
        return Err(Error::Data(format!("missing `{FORMAT_MAGIC}` header")));
    }
    let version = it.next().unwrap_or("");
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version.to_string()));
    }
    let mut fps = None;
    let mut frames = None;
    for kv in it {
        let bad = || Error::Data(format!("malformed header field `{kv}`"));
        let (k, v) = kv.split_once('=').ok_or_else(bad)?;
        match k {
            "fps" => fps = Some(v.parse::<f64>().map_err(|_| bad())?),
            "frames" => frames = Some(v.parse::<u64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    match fps {
        Some(f) if f.is_finite() && f > 0.0 => Ok((f, frames)),
        _ => Err(Error::Data("header needs a positive fps".into())),
    }
}

/// Parses scenario text; `path` is only used in error messages.
pub fn parse_str(text: &str, path: &Path) -> Result<Scenario> {
    let mut lines = text.lines().enumerate();
    let (fps, declared_frames) = match lines.next() {
        Some((_, h)) => parse_header(h).map_err(|e| match e {
            Error::Data(msg) => Error::Parse { path: path.to_path_buf(), line: 1, msg },
            other => other,
        })?,
        None => return Err(Error::Parse { path: path.to_path_buf(), line: 1, msg: "empty file".into() }),
    };

    let mut s = Scenario::empty(fps);
    let mut max_frame: Option<u64> = None;
    for (i, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed = parse_record(&mut s, trimmed, fps);
        match parsed {
            Ok(frame) => {
                if let Some(n) = declared_frames {
                    if frame >= n {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line: i + 1,
                            msg: format!("frame {frame} outside declared {n} frames"),
                        });
                    }
                }
                max_frame = Some(max_frame.map_or(frame, |m| m.max(frame)));
            }
            Err(msg) => return Err(Error::Parse { path: path.to_path_buf(), line: i + 1, msg }),
        }
    }
    s.frames = declared_frames.unwrap_or_else(|| max_frame.map_or(0, |m| m + 1));
    Ok(s)
}

fn parse_record(s: &mut Scenario, line: &str, fps: f64) -> std::result::Result<u64, String> {
    let mut f = Fields { tokens: line.split_whitespace().collect(), pos: 0 };
    let kind = f.next()?;
    let frame: u64 = f.uint()?;
    match kind {
        "gt" => {
            let gt_person_id: u32 = f.uint()?;
            let bbox = f.bbox()?;
            let head_theta = f.float()?;
            let head_size = f.float()?;
            if head_size <= 0.0 {
                return Err(format!("head_size must be positive, got {head_size}"));
            }
            let skeleton = f.skeleton()?;
            s.gt.push(GroundTruthRecord {
                frame: FrameStamp::at(frame, fps),
                gt_person_id,
                bbox,
                head_theta,
                skeleton,
                head_size,
            });
        }
        "det" => {
            let bbox = f.bbox()?;
            s.detections.push(DetectionRecord { frame, bbox });
        }
        "obs-head" => {
            let person = f.uint()?;
            let theta = f.float()?;
            s.head_obs.push(HeadObsRecord { frame, person, theta });
        }
        "obs-skel" => {
            let person = f.uint()?;
            let skeleton = f.skeleton()?;
            s.skel_obs.push(SkelObsRecord { frame, person, skeleton });
        }
        "trk" => {
            let track_id = f.track()?;
            let bbox = f.bbox()?;
            s.tracks.push(TrackRecord { frame, track_id, bbox });
        }
        "trk-attr" => {
            let track_id = f.track()?;
            let channel: Channel = f.next()?.parse().map_err(|e: Error| e.to_string())?;
            let value = match channel {
                Channel::Head => AttrValue::Angle(f.float()?),
                Channel::Joint(_) => AttrValue::Point(Point2::new(f.float()?, f.float()?)),
            };
            let observed = match f.next()? {
                "0" => false,
                "1" => true,
                other => return Err(format!("observed flag must be 0 or 1, got `{other}`")),
            };
            s.attrs.push(AttrRecord { frame, track_id, channel, value, observed });
        }
        other => return Err(format!("unknown record kind `{other}`")),
    }
    f.finish()?;
    Ok(frame)
}
