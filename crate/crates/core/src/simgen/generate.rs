use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::spec::{PersonSpec, ScenarioSpec, SKELETON_TEMPLATE};
use crate::angle::wrap_unchecked;
use crate::error::{Error, Result};
use crate::scenario::{quantize, DetectionRecord, HeadObsRecord, Scenario, SkelObsRecord};
use crate::types::{BBox, FrameStamp, GroundTruthRecord, JointName, Point2, SkeletonObservation};

fn canonical(theta: f64) -> f64 {
    wrap_unchecked(quantize(wrap_unchecked(theta)))
}

/// Segment index covering lifetime frame `k`.
fn segment_at(lengths: impl Iterator<Item = u64>, k: u64) -> usize {
    let mut end = 0;
    for (i, len) in lengths.enumerate() {
        end += len;
        if k < end {
            return i;
        }
    }
    unreachable!("segments tile the lifetime")
}

/// Ground truth of one person over its lifetime, in frame order.
fn person_truth(spec: &ScenarioSpec, person_id: u32, p: &PersonSpec) -> Result<Vec<GroundTruthRecord>> {
    let dt = 1.0 / spec.fps;
    let (w, h) = (p.size[0], p.size[1]);
    let (mut x, mut y) = (p.start[0], p.start[1]);
    let mut theta = p.head.initial;
    let mut out = Vec::with_capacity((p.exit - p.entry) as usize);

    for k in 0..p.exit - p.entry {
        let frame = p.entry + k;
        let seg = segment_at(p.motion.iter().map(|s| s.frames), k);
        let bbox = BBox::new(quantize(x), quantize(y), quantize(w), quantize(h))?;
        if bbox.x < 0.0 || bbox.y < 0.0 || bbox.x + bbox.w > spec.width || bbox.y + bbox.h > spec.height {
            return Err(Error::Validation(format!(
                "person {person_id} motion segment {seg} (frame {frame}): bbox ({:.1}, {:.1}, {:.1}, {:.1}) leaves the {}x{} image",
                bbox.x, bbox.y, bbox.w, bbox.h, spec.width, spec.height
            )));
        }

        let t = k as f64 * dt;
        let mut skeleton = SkeletonObservation::default();
        for joint in JointName::ALL {
            let j = joint.index();
            let amp = p.articulation.amplitude[j];
            let arg = TAU * t / p.articulation.period[j] + 0.9 * j as f64;
            let u = x + SKELETON_TEMPLATE[j][0] * w + amp * arg.sin();
            let v = y + SKELETON_TEMPLATE[j][1] * h + 0.5 * amp * arg.cos();
            let m = spec.joint_margin;
            if u < x - m || u > x + w + m || v < y - m || v > y + h + m {
                return Err(Error::Validation(format!(
                    "person {person_id} (frame {frame}): joint {joint} leaves the bbox margin of {m} px"
                )));
            }
            skeleton.set(joint, Some(Point2::new(quantize(u), quantize(v))));
        }
        let head = skeleton.joint(JointName::Head).expect("set above");
        let neck = skeleton.joint(JointName::Neck).expect("set above");
        let head_size = quantize(2.0 * head.distance(&neck));
        if head_size <= 0.0 {
            return Err(Error::Validation(format!("person {person_id}: degenerate head size")));
        }

        out.push(GroundTruthRecord {
            frame: FrameStamp::at(frame, spec.fps),
            gt_person_id: person_id,
            bbox,
            head_theta: canonical(theta),
            skeleton,
            head_size,
        });

        let vel = p.motion[seg].velocity;
        x += vel[0] * dt;
        y += vel[1] * dt;
        let hseg = segment_at(p.head.segments.iter().map(|s| s.frames), k);
        theta = wrap_unchecked(theta + p.head.segments[hseg].rate * dt);
    }
    Ok(out)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Builds a full scenario from `spec`. Identical `(spec, seed)` pairs give
/// identical scenarios.
///
/// Every random draw happens regardless of the noise magnitudes, so two
/// specs differing only in noise levels consume the same random stream.
pub fn generate(spec: &ScenarioSpec, seed: u64) -> Result<Scenario> {
    spec.validate()?;
    let mut truth: Vec<Vec<GroundTruthRecord>> = vec![Vec::new(); spec.frames as usize];
    for (i, p) in spec.persons.iter().enumerate() {
        for rec in person_truth(spec, i as u32 + 1, p)? {
            truth[rec.frame.frame_index as usize].push(rec);
        }
    }

    let noise = &spec.noise;
    let fp_count = if noise.detector.fp_rate > 0.0 {
        Some(Poisson::new(noise.detector.fp_rate).map_err(|e| Error::Validation(format!("fp_rate: {e}")))?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Scenario::empty(spec.fps);
    s.frames = spec.frames;

    for (f, people) in truth.into_iter().enumerate() {
        let f = f as u64;
        for gt in &people {
            let missed = rng.random::<f64>() < noise.detector.miss_prob;
            let (cx, cy) = gt.bbox.center();
            let cx = cx + noise.detector.center_sigma * normal(&mut rng);
            let cy = cy + noise.detector.center_sigma * normal(&mut rng);
            let w = (gt.bbox.w + noise.detector.size_sigma * normal(&mut rng)).max(1.0);
            let h = (gt.bbox.h + noise.detector.size_sigma * normal(&mut rng)).max(1.0);
            if !missed {
                let bbox = if noise.detector.center_sigma == 0.0 && noise.detector.size_sigma == 0.0 {
                    gt.bbox
                } else {
                    BBox::new(quantize(cx - 0.5 * w), quantize(cy - 0.5 * h), quantize(w), quantize(h))?
                };
                s.detections.push(DetectionRecord { frame: f, bbox });
            }
        }
        if let Some(dist) = &fp_count {
            let n = dist.sample(&mut rng) as u64;
            for _ in 0..n {
                let w = rng.random_range(40.0..100.0f64).min(spec.width);
                let h = (2.0 * w).min(spec.height);
                let x = rng.random::<f64>() * (spec.width - w);
                let y = rng.random::<f64>() * (spec.height - h);
                let bbox = BBox::new(quantize(x), quantize(y), quantize(w), quantize(h))?;
                s.detections.push(DetectionRecord { frame: f, bbox });
            }
        }

        for gt in &people {
            let outlier = rng.random::<f64>() < noise.head.outlier_prob;
            let jitter = noise.head.sigma * normal(&mut rng);
            let uniform = 180.0 - 360.0 * rng.random::<f64>();
            let theta = if outlier { uniform } else { gt.head_theta + jitter };
            s.head_obs.push(HeadObsRecord { frame: f, person: gt.gt_person_id, theta: canonical(theta) });
        }

        for gt in &people {
            let mut skel = SkeletonObservation::default();
            for joint in JointName::ALL {
                let j = joint.index();
                let dropped = rng.random::<f64>() < noise.skeleton.dropout[j];
                let du = noise.skeleton.sigma[j] * normal(&mut rng);
                let dv = noise.skeleton.sigma[j] * normal(&mut rng);
                if dropped {
                    continue;
                }
                let truth = gt.skeleton.joint(joint).expect("ground truth joints are visible");
                skel.set(joint, Some(Point2::new(quantize(truth.u + du), quantize(truth.v + dv))));
            }
            s.skel_obs.push(SkelObsRecord { frame: f, person: gt.gt_person_id, skeleton: skel });
        }

        s.gt.extend(people);
    }
    Ok(s)
}
