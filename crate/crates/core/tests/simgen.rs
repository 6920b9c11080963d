use detta::angle::angular_diff;
use detta::metrics::{clear_scenario, ChannelSelector, EvalContext, Source};
use detta::pipeline::{run, RunConfig};
use detta::scenario::{parse_str, to_string};
use detta::simgen::{generate, preset, turning_head, HeadNoise, MotionSegment, NoiseSpec, ScenarioSpec, PRESETS};
use detta::Error;
use proptest::prelude::*;

fn zero_noise(mut spec: ScenarioSpec) -> ScenarioSpec {
    spec.noise = NoiseSpec::default();
    spec
}

#[test]
fn same_seed_same_bytes_distinct_seeds_differ() {
    let spec = preset("crossing-pair").unwrap();
    let a = to_string(&generate(&spec, 9).unwrap());
    let b = to_string(&generate(&spec, 9).unwrap());
    let c = to_string(&generate(&spec, 10).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn zero_noise_observations_equal_truth() {
    let s = generate(&zero_noise(preset("crossing-pair").unwrap()), 4).unwrap();
    assert_eq!(s.detections.len(), s.gt.len());
    for (d, g) in s.detections.iter().zip(&s.gt) {
        assert_eq!(d.bbox, g.bbox);
    }
    for (h, g) in s.head_obs.iter().zip(&s.gt) {
        assert_eq!((h.person, h.theta), (g.gt_person_id, g.head_theta));
    }
    for (k, g) in s.skel_obs.iter().zip(&s.gt) {
        assert_eq!(k.skeleton, g.skeleton);
    }
}

#[test]
fn zero_noise_pipeline_scores_perfectly() {
    let spec = zero_noise(preset("single-walker").unwrap());
    let s = generate(&spec, 1).unwrap();
    let out = run(&s, &RunConfig::default()).unwrap().scenario;
    let clear = clear_scenario(&out, 0.5).unwrap();
    let r = clear.report;
    assert_eq!((r.fp, r.ids), (0, 0));
    assert_eq!(r.fn_, 1, "one frame of confirmation latency");
    assert_eq!(r.motp, 1.0);

    let eval = EvalContext::new(&out, &clear.correspondences).unwrap().evaluate(&out.attrs).unwrap();
    for sel in ChannelSelector::standard() {
        let raw = eval.report(&sel, Source::Raw).unwrap();
        assert_eq!((raw.mean_offset, raw.score), (0.0, 1.0), "{sel} raw");
        let filt = eval.report(&sel, Source::Filtered).unwrap();
        assert_eq!(filt.score, 1.0, "{sel} filtered");
    }
    // constant-rate heads are followed exactly once the filter has converged
    let head = eval.report(&ChannelSelector::Head, Source::Filtered).unwrap();
    assert!(head.mean_offset < 1.0, "{}", head.mean_offset);
}

#[test]
fn head_noise_sigma_is_calibrated() {
    // 1 person x 10000 frames, stationary, head noise only
    let mut spec = turning_head(10_000, 37.0, 20.0);
    spec.noise.head = HeadNoise { sigma: 20.0, outlier_prob: 0.0 };
    let s = generate(&spec, 77).unwrap();
    let residuals: Vec<f64> =
        s.head_obs.iter().zip(&s.gt).map(|(o, g)| angular_diff(o.theta, g.head_theta).unwrap()).collect();
    assert_eq!(residuals.len(), 10_000);
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let sd = (residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((sd - 20.0).abs() / 20.0 < 0.03, "sample sigma {sd}");
}

#[test]
fn presets_have_documented_sizes() {
    let count = |name: &str| {
        let p = preset(name).unwrap();
        (p.persons.len(), p.frames)
    };
    assert_eq!(count("single-walker"), (1, 300));
    assert_eq!(count("crossing-pair"), (2, 200));
    assert_eq!(count("deboarding-77"), (77, 1218));
    assert!(matches!(preset("foo"), Err(Error::Config(_))));
    for name in PRESETS {
        let s = generate(&preset(name).unwrap(), 0).unwrap();
        assert_eq!(s.frames, preset(name).unwrap().frames);
    }
}

#[test]
fn deboarding_generates_every_person() {
    let s = generate(&preset("deboarding-77").unwrap(), 7).unwrap();
    let ids: std::collections::BTreeSet<u32> = s.gt.iter().map(|g| g.gt_person_id).collect();
    assert_eq!(ids.len(), 77);
    assert_eq!(s.frames, 1218);
    for g in &s.gt {
        assert!(g.head_size > 0.0);
        assert!(g.head_theta > -180.0 && g.head_theta <= 180.0);
    }
}

#[test]
fn infeasible_spec_names_the_segment() {
    let mut spec = preset("single-walker").unwrap();
    spec.persons[0].motion = vec![
        MotionSegment { frames: 100, velocity: [0.0, 0.0] },
        MotionSegment { frames: 200, velocity: [400.0, 0.0] },
    ];
    match generate(&spec, 0) {
        Err(Error::Validation(msg)) => {
            assert!(msg.contains("person 1"), "{msg}");
            assert!(msg.contains("segment 1"), "{msg}");
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
    let mut bad = preset("single-walker").unwrap();
    bad.noise.head.outlier_prob = 1.5;
    assert!(matches!(generate(&bad, 0), Err(Error::Validation(_))));
}

#[test]
fn spec_toml_round_trips() {
    for name in PRESETS {
        let spec = preset(name).unwrap();
        assert_eq!(ScenarioSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    }
    let minimal = r#"
        frames = 10
        [[persons]]
        entry = 0
        exit = 10
        start = [10.0, 10.0]
        size = [50.0, 100.0]
        motion = [{ frames = 10, velocity = [5.0, 0.0] }]
        head = { initial = 0.0, segments = [{ frames = 10, rate = 30.0 }] }
    "#;
    let spec = ScenarioSpec::from_toml(minimal).unwrap();
    assert_eq!(spec.fps, 30.0);
    assert_eq!(generate(&spec, 0).unwrap().gt.len(), 10);
    assert!(ScenarioSpec::from_toml("frames = 1\npersons = []\nbogus = 2").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_scenarios_round_trip(seed in any::<u64>(), which in prop::sample::select(vec![0usize, 1, 3])) {
        let spec = preset(PRESETS[which]).unwrap();
        let s = generate(&spec, seed).unwrap();
        let text = to_string(&s);
        let back = parse_str(&text, std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(to_string(&back), text);
    }
}
