//! Built-in scenario specs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::{
    Articulation, DetectorNoise, HeadNoise, HeadSegment, HeadSpec, MotionSegment, NoiseSpec, PersonSpec, ScenarioSpec,
    SkeletonNoise,
};
use crate::error::{Error, Result};

pub const PRESETS: [&str; 4] = ["single-walker", "crossing-pair", "deboarding-77", "turning-head"];

/// Looks up a built-in spec by name.
pub fn preset(name: &str) -> Result<ScenarioSpec> {
    match name {
        "single-walker" => Ok(single_walker()),
        "crossing-pair" => Ok(crossing_pair()),
        "deboarding-77" => Ok(deboarding(77, 1218)),
        "turning-head" => Ok(turning_head(150, 150.0, 20.0)),
        other => Err(Error::Config(format!("unknown preset `{other}` (known: {})", PRESETS.join(", ")))),
    }
}

fn typical_noise() -> NoiseSpec {
    NoiseSpec {
        detector: DetectorNoise { miss_prob: 0.03, fp_rate: 0.05, center_sigma: 2.0, size_sigma: 2.0 },
        head: HeadNoise { sigma: 20.0, outlier_prob: 0.08 },
        skeleton: SkeletonNoise {
            sigma: [4.0, 4.0, 5.0, 5.0, 6.0, 6.0, 8.0, 8.0],
            dropout: [0.02, 0.02, 0.03, 0.03, 0.05, 0.05, 0.08, 0.08],
        },
    }
}

fn walker(
    entry: u64,
    exit: u64,
    start: [f64; 2],
    size: [f64; 2],
    motion: Vec<MotionSegment>,
    head: HeadSpec,
) -> PersonSpec {
    PersonSpec { entry, exit, start, size, motion, head, articulation: Articulation::default() }
}

fn single_walker() -> ScenarioSpec {
    ScenarioSpec {
        fps: 30.0,
        frames: 300,
        width: 640.0,
        height: 480.0,
        joint_margin: 10.0,
        persons: vec![walker(
            0,
            300,
            [50.0, 150.0],
            [80.0, 160.0],
            vec![
                MotionSegment { frames: 150, velocity: [60.0, 0.0] },
                MotionSegment { frames: 150, velocity: [-40.0, 5.0] },
            ],
            HeadSpec {
                initial: 0.0,
                segments: vec![
                    HeadSegment { frames: 100, rate: 30.0 },
                    HeadSegment { frames: 100, rate: -60.0 },
                    HeadSegment { frames: 100, rate: 0.0 },
                ],
            },
        )],
        noise: typical_noise(),
    }
}

fn crossing_pair() -> ScenarioSpec {
    ScenarioSpec {
        fps: 30.0,
        frames: 200,
        width: 640.0,
        height: 480.0,
        joint_margin: 10.0,
        persons: vec![
            walker(
                0,
                200,
                [40.0, 160.0],
                [80.0, 160.0],
                vec![MotionSegment { frames: 200, velocity: [60.0, 0.0] }],
                HeadSpec { initial: 90.0, segments: vec![HeadSegment { frames: 200, rate: 20.0 }] },
            ),
            walker(
                0,
                200,
                [520.0, 170.0],
                [80.0, 160.0],
                vec![MotionSegment { frames: 200, velocity: [-60.0, 0.0] }],
                HeadSpec { initial: -90.0, segments: vec![HeadSegment { frames: 200, rate: -25.0 }] },
            ),
        ],
        noise: typical_noise(),
    }
}

/// One person whose head turns at a constant `rate` (deg/s) with Gaussian
/// observation noise `sigma` (deg), under a noise-free detector.
pub fn turning_head(frames: u64, rate: f64, sigma: f64) -> ScenarioSpec {
    ScenarioSpec {
        fps: 30.0,
        frames,
        width: 640.0,
        height: 480.0,
        joint_margin: 10.0,
        persons: vec![walker(
            0,
            frames,
            [280.0, 160.0],
            [80.0, 160.0],
            vec![MotionSegment { frames, velocity: [0.0, 0.0] }],
            HeadSpec { initial: 0.0, segments: vec![HeadSegment { frames, rate }] },
        )],
        noise: NoiseSpec { head: HeadNoise { sigma, outlier_prob: 0.0 }, ..NoiseSpec::default() },
    }
}

/// `persons` people leaving a gate over `frames` frames: each walks in from
/// a side, stops to look around and gesture, then walks on.
///
/// The layout is fixed; only noise varies with the generation seed.
pub fn deboarding(persons: u32, frames: u64) -> ScenarioSpec {
    const LAYOUT_SEED: u64 = 0x0de_b0a2d;
    let mut rng = ChaCha8Rng::seed_from_u64(LAYOUT_SEED);
    let (width, height, fps) = (640.0, 480.0, 30.0);
    let lanes = [110.0, 170.0, 230.0];
    let span = frames.saturating_sub(160).max(1);

    let people = (0..persons)
        .map(|i| {
            let entry = (i as u64 * span) / persons as u64;
            let life = rng.random_range(150..=250u64).min(frames - entry);
            let exit = entry + life;

            let w = rng.random_range(60.0..90.0f64);
            let h = (w * rng.random_range(2.0..2.3f64)).min(height - 240.0);
            let lane = lanes[rng.random_range(0..lanes.len())] + rng.random_range(-10.0..10.0f64);
            let rightward = rng.random::<bool>();
            let x0 =
                if rightward { rng.random_range(5.0..60.0f64) } else { width - w - rng.random_range(5.0..60.0f64) };

            let stand = rng.random_range(40..=100u64).min(life / 2);
            let walk_a = (life - stand) / 2;
            let walk_b = life - stand - walk_a;
            let room = width - w - 10.0 - if rightward { x0 } else { width - w - x0 };
            let walking_secs = (walk_a + walk_b) as f64 / fps;
            let speed = rng.random_range(40.0..80.0f64).min(room / walking_secs.max(1e-9));
            let vx = if rightward { speed } else { -speed };
            let drift = rng.random_range(-3.0..3.0f64);
            let motion = vec![
                MotionSegment { frames: walk_a, velocity: [vx, drift] },
                MotionSegment { frames: stand, velocity: [0.0, 0.0] },
                MotionSegment { frames: walk_b, velocity: [vx, -drift] },
            ];

            let mut segments = Vec::new();
            let mut left = life;
            while left > 0 {
                let n = rng.random_range(20..=60u64).min(left);
                let rate = rng.random_range(-90.0..90.0f64);
                segments.push(HeadSegment { frames: n, rate });
                left -= n;
            }
            let initial = if rightward { 90.0 } else { -90.0 } + rng.random_range(-30.0..30.0f64);

            let mut articulation = Articulation::default();
            if rng.random::<f64>() < 0.4 {
                // pointing: larger, slower wrist and elbow swings
                articulation.amplitude[4] = 5.0;
                articulation.amplitude[5] = 5.0;
                articulation.amplitude[6] = 12.0;
                articulation.amplitude[7] = 12.0;
                articulation.period[6] = 2.4;
                articulation.period[7] = 2.4;
            }

            PersonSpec {
                entry,
                exit,
                start: [x0, lane],
                size: [w, h],
                motion,
                head: HeadSpec { initial, segments },
                articulation,
            }
        })
        .collect();

    ScenarioSpec { fps, frames, width, height, joint_margin: 10.0, persons: people, noise: typical_noise() }
}
