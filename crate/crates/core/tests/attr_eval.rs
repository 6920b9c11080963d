use detta::metrics::{clear_scenario, ChannelSelector, EvalContext, Source};
use detta::pipeline::{run, RunConfig};
use detta::scenario::{AttrValue, Channel, Scenario};
use detta::simgen::{generate, preset, turning_head};
use detta::types::TrackId;

fn evaluate(s: &Scenario) -> Vec<(String, Source, f64, f64, usize)> {
    let clear = clear_scenario(s, 0.5).unwrap();
    let eval = EvalContext::new(s, &clear.correspondences).unwrap().evaluate(&s.attrs).unwrap();
    eval.full_report(&ChannelSelector::standard())
        .unwrap()
        .rows
        .into_iter()
        .map(|r| (r.selector, r.source, r.mean_offset, r.score, r.samples))
        .collect()
}

#[test]
fn scores_ignore_track_labels() {
    let s = generate(&preset("crossing-pair").unwrap(), 21).unwrap();
    let out = run(&s, &RunConfig::default()).unwrap().scenario;
    let mut relabeled = out.clone();
    let remap = |id: TrackId| TrackId::new(1000 - id.get()).unwrap();
    for t in &mut relabeled.tracks {
        t.track_id = remap(t.track_id);
    }
    for a in &mut relabeled.attrs {
        a.track_id = remap(a.track_id);
    }
    assert_eq!(evaluate(&out), evaluate(&relabeled));
}

/// Textbook g-h recursion on degrees, one step per frame.
fn reference_gh(obs: &[f64], g: f64, h: f64, dt: f64) -> Vec<f64> {
    let wrap = |a: f64| {
        let r = (a + 180.0).rem_euclid(360.0) - 180.0;
        if r == -180.0 {
            180.0
        } else {
            r
        }
    };
    let mut x = obs[0];
    let mut v = 0.0;
    let mut out = vec![x];
    for &z in &obs[1..] {
        let xp = x + v * dt;
        let r = wrap(z - xp);
        x = wrap(xp + g * r);
        v += h * r / dt;
        out.push(x);
    }
    out
}

#[test]
fn filtered_heads_follow_reference_and_beat_raw() {
    let s = generate(&turning_head(300, 150.0, 20.0), 5).unwrap();
    let out = run(&s, &RunConfig::default()).unwrap().scenario;
    let track = out.tracks[0].track_id;
    assert!(out.tracks.iter().all(|t| t.track_id == track));
    let first = out.tracks[0].frame;

    let obs: Vec<f64> = s.head_obs.iter().filter(|o| o.frame >= first).map(|o| o.theta).collect();
    let expected = reference_gh(&obs, 0.5, 0.02, 1.0 / 30.0);
    let got: Vec<f64> = out
        .attrs
        .iter()
        .filter(|a| a.channel == Channel::Head && a.track_id == track)
        .map(|a| match a.value {
            AttrValue::Angle(x) => x,
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(got.len(), expected.len());
    for (i, (a, b)) in got.iter().zip(&expected).enumerate() {
        let d = detta::angle::angular_distance(*a, *b).unwrap();
        assert!(d < 1e-9, "frame {}: {a} vs {b}", first + i as u64);
    }

    let clear = clear_scenario(&out, 0.5).unwrap();
    let eval = EvalContext::new(&out, &clear.correspondences).unwrap().evaluate(&out.attrs).unwrap();
    let raw = eval.report(&ChannelSelector::Head, Source::Raw).unwrap();
    let filt = eval.report(&ChannelSelector::Head, Source::Filtered).unwrap();
    assert!(filt.mean_offset < raw.mean_offset, "{} vs {}", filt.mean_offset, raw.mean_offset);
}
