use std::collections::BTreeMap;

use detta::angle::angular_distance;
use detta::bank::{ChannelParams, FilterBank, FreeFlightConfig, ModuleSchedule, HEAD_MODULE, SKELETON_MODULE};
use detta::ghfilter::GHParams;
use detta::scenario::{AttrValue, Channel};
use detta::types::{
    AttributeObservation, FrameStamp, HeadOrientation, JointName, Point2, SkeletonObservation, TrackId,
};
use proptest::prelude::*;

const FPS: f64 = 30.0;

fn tid(i: u32) -> TrackId {
    TrackId::new(i).unwrap()
}

fn schedule(head: (u64, u64), skel: (u64, u64)) -> FreeFlightConfig {
    FreeFlightConfig::new([
        (HEAD_MODULE.to_string(), ModuleSchedule::with_phase(head.0, head.1)),
        (SKELETON_MODULE.to_string(), ModuleSchedule::with_phase(skel.0, skel.1)),
    ])
    .unwrap()
}

fn head_obs(theta: f64) -> AttributeObservation {
    AttributeObservation::Angular(HeadOrientation::new(theta).unwrap())
}

/// One frame of a synthetic stream: live tracks and their observations.
#[derive(Debug, Clone)]
struct Frame {
    live: Vec<u32>,
    head: Vec<(u32, f64)>,
    /// `(track, joint index, point)`.
    joints: Vec<(u32, usize, (f64, f64))>,
}

fn frame_strategy() -> impl Strategy<Value = Frame> {
    let live = proptest::collection::btree_set(1u32..5, 0..4);
    live.prop_flat_map(|live| {
        let live: Vec<u32> = live.into_iter().collect();
        let n = live.len();
        (
            Just(live.clone()),
            proptest::collection::vec((any::<bool>(), -179.0f64..=180.0), n),
            proptest::collection::vec(
                proptest::collection::vec(proptest::option::of((0.0f64..640.0, 0.0f64..480.0)), 8),
                n,
            ),
        )
            .prop_map(|(live, heads, skels)| {
                let mut head = Vec::new();
                let mut joints = Vec::new();
                for (i, id) in live.iter().enumerate() {
                    if heads[i].0 {
                        head.push((*id, heads[i].1));
                    }
                    for (j, p) in skels[i].iter().enumerate() {
                        if let Some(p) = p {
                            joints.push((*id, j, *p));
                        }
                    }
                }
                Frame { live, head, joints }
            })
    })
}

fn observations(fr: &Frame) -> Vec<(TrackId, AttributeObservation)> {
    let mut out: Vec<(TrackId, AttributeObservation)> =
        fr.head.iter().map(|(id, th)| (tid(*id), head_obs(*th))).collect();
    for id in &fr.live {
        let mut skel = SkeletonObservation::default();
        let mut any = false;
        for (tid_, j, (u, v)) in &fr.joints {
            if tid_ == id {
                skel.set(JointName::ALL[*j], Some(Point2::new(*u, *v)));
                any = true;
            }
        }
        if any {
            out.push((tid(*id), AttributeObservation::Skeleton(skel)));
        }
    }
    out
}

/// Hold-last-value reference: remembers the last scheduled observation per
/// key and forgets a track once it has been absent `expire` frames.
fn hold_last(
    frames: &[Frame],
    head: (u64, u64),
    skel: (u64, u64),
    expire: u64,
) -> Vec<Vec<((u32, String), (f64, f64), bool)>> {
    let mut held: BTreeMap<(u32, String), (f64, f64)> = BTreeMap::new();
    let mut seen: BTreeMap<u32, u64> = BTreeMap::new();
    let mut out = Vec::new();
    for (f, fr) in frames.iter().enumerate() {
        let f = f as u64;
        for id in &fr.live {
            seen.insert(*id, f);
        }
        let gone: Vec<u32> = seen.iter().filter(|(_, s)| f - **s >= expire).map(|(id, _)| *id).collect();
        for id in gone {
            seen.remove(&id);
            held.retain(|k, _| k.0 != id);
        }
        let mut fresh = Vec::new();
        if f % head.0 == head.1 {
            for (id, th) in &fr.head {
                held.insert((*id, "head".into()), (*th, 0.0));
                fresh.push((*id, "head".to_string()));
            }
        }
        if f % skel.0 == skel.1 {
            for (id, j, p) in &fr.joints {
                let key = (*id, format!("skel.{}", JointName::ALL[*j]));
                held.insert(key.clone(), *p);
                fresh.push(key);
            }
        }
        out.push(held.iter().map(|(k, v)| (k.clone(), *v, fresh.contains(k))).collect());
    }
    out
}

fn flatten(value: AttrValue) -> (f64, f64) {
    match value {
        AttrValue::Angle(a) => (a, 0.0),
        AttrValue::Point(p) => (p.u, p.v),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn keep_gains_hold_the_last_observation(
        frames in proptest::collection::vec(frame_strategy(), 1..60),
        head_stride in 1u64..6, skel_stride in 1u64..6,
        head_phase in 0u64..6, skel_phase in 0u64..6,
        expire in 1u64..12,
    ) {
        let head = (head_stride, head_phase % head_stride);
        let skel = (skel_stride, skel_phase % skel_stride);
        let mut bank = FilterBank::new(ChannelParams::uniform(GHParams::keep()), schedule(head, skel), expire).unwrap();
        let expected = hold_last(&frames, head, skel, expire);
        for (f, fr) in frames.iter().enumerate() {
            let live: Vec<TrackId> = fr.live.iter().map(|i| tid(*i)).collect();
            let got: Vec<((u32, String), (f64, f64), bool)> = bank
                .on_frame(FrameStamp::at(f as u64, FPS), &live, &observations(fr))
                .unwrap()
                .into_iter()
                .map(|o| ((o.key.track_id.get(), o.key.channel.to_string()), flatten(o.value), o.observed))
                .collect();
            // bitwise comparison of the held values
            let bits = |v: &[((u32, String), (f64, f64), bool)]| {
                let mut v: Vec<_> = v.iter().map(|(k, (a, b), o)| (k.clone(), a.to_bits(), b.to_bits(), *o)).collect();
                v.sort();
                v
            };
            prop_assert_eq!(bits(&got), bits(&expected[f]), "frame {}", f);
        }
    }
}

#[test]
fn every_live_key_reports_every_frame() {
    let mut bank = FilterBank::new(ChannelParams::default(), FreeFlightConfig::uniform(3), 10).unwrap();
    let mut last_len = 0;
    for f in 0..30u64 {
        let obs = vec![(tid(1), head_obs(f as f64))];
        let out = bank.on_frame(FrameStamp::at(f, FPS), &[tid(1)], &obs).unwrap();
        if f == 0 {
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].value, AttrValue::Angle(0.0));
        }
        assert!(out.len() >= last_len);
        assert_eq!(out.iter().filter(|o| o.key.channel == Channel::Head).count(), 1);
        assert_eq!(out[0].observed, f % 3 == 0);
        last_len = out.len();
    }
}

#[test]
fn unknown_track_observations_are_counted_not_fatal() {
    let mut bank = FilterBank::new(ChannelParams::default(), FreeFlightConfig::uniform(1), 10).unwrap();
    let out =
        bank.on_frame(FrameStamp::at(0, FPS), &[tid(1)], &[(tid(2), head_obs(5.0)), (tid(1), head_obs(7.0))]).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(bank.dropped_observations(), 1);
}

#[test]
fn id_switch_restarts_from_the_observation() {
    let params = ChannelParams::default();
    let mut bank = FilterBank::new(params, FreeFlightConfig::uniform(1), 10).unwrap();
    // same person, rotating at 90 deg/s; identity 7 for 20 frames, then 9
    let truth = |f: u64| detta::angle::wrap_angle(90.0 * f as f64 / FPS).unwrap();
    for f in 0..20 {
        bank.on_frame(FrameStamp::at(f, FPS), &[tid(7)], &[(tid(7), head_obs(truth(f) + 15.0))]).unwrap();
    }
    let out = bank.on_frame(FrameStamp::at(20, FPS), &[tid(9)], &[(tid(9), head_obs(truth(20)))]).unwrap();
    let new = out.iter().find(|o| o.key.track_id == tid(9)).unwrap();
    assert_eq!(new.value, AttrValue::Angle(truth(20)));
    // the old key keeps predicting until it expires
    assert!(out.iter().any(|o| o.key.track_id == tid(7)));
    let mut f = 21;
    loop {
        let out = bank.on_frame(FrameStamp::at(f, FPS), &[tid(9)], &[(tid(9), head_obs(truth(f)))]).unwrap();
        if out.iter().all(|o| o.key.track_id != tid(7)) {
            break;
        }
        f += 1;
    }
    assert_eq!(f, 19 + 10, "track 7 was last seen at frame 19");
}

#[test]
fn stride_three_predictions_match_constant_velocity_truth() {
    let rate = 150.0;
    let theta0 = -120.0;
    let truth = |f: u64| detta::angle::wrap_angle(theta0 + rate * f as f64 / FPS).unwrap();
    let sched = schedule((3, 0), (3, 1));
    let mut bank = FilterBank::new(ChannelParams::default(), sched, 10).unwrap();
    let mut worst_late = 0.0f64;
    for f in 0..1500u64 {
        let out = bank.on_frame(FrameStamp::at(f, FPS), &[tid(1)], &[(tid(1), head_obs(truth(f)))]).unwrap();
        let AttrValue::Angle(x) = out[0].value else { panic!() };
        if f >= 1200 && f % 3 != 0 {
            worst_late = worst_late.max(angular_distance(x, truth(f)).unwrap());
        }
    }
    assert!(worst_late < 1e-6, "free-flight error after convergence: {worst_late}");
}
